#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace cbo {

/// Two objectives, both maximised.
using ObjectivePair = std::array<double, 2>;

struct MooProblem {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::function<ObjectivePair(const Eigen::VectorXd&)> evaluate;
  /// Individuals injected into the initial population ahead of the LHS fill.
  std::vector<Eigen::VectorXd> seeded;

  Eigen::Index dim() const { return lower.size(); }
};

struct ParetoEntry {
  Eigen::VectorXd decision;
  ObjectivePair objectives{};
};

struct ParetoArchive {
  std::vector<ParetoEntry> entries;
};

struct Nsga2Options {
  int pop_size = 50;
  int generations = 100;
  double crossover_rate = 0.9;
  double crossover_eta = 15.0;
  double mutation_eta = 20.0;
  /// Per-variable mutation probability; <= 0 means 1/dim.
  double mutation_rate = -1.0;
};

/// Returns true when `a` dominates `b`: no worse in both, better in one.
bool dominates(const ObjectivePair& a, const ObjectivePair& b);

/// Indices of the nondominated points, in input order.
std::vector<std::size_t> pareto_filter(const std::vector<ObjectivePair>& points);

/// Rank of each point by fast nondominated sorting (0 = first front).
std::vector<int> nondominated_ranks(const std::vector<ObjectivePair>& points);

/// NSGA-II with binary tournament, SBX crossover and polynomial mutation.
/// Returns the first front of the final population, deduplicated.
ParetoArchive nsga2(const MooProblem& problem, const Nsga2Options& options,
                    std::uint64_t seed);

/// Entry farthest from the chord joining the two extremes of the front after
/// min-max normalisation of each objective. Ties go to the larger
/// normalised first objective, then to the lower index.
std::size_t knee_index(const ParetoArchive& archive);
const ParetoEntry& knee_point(const ParetoArchive& archive);

/// Area dominated by `points` and bounded below by `reference`.
double hypervolume(const std::vector<ObjectivePair>& points,
                   const ObjectivePair& reference);

}  // namespace cbo
