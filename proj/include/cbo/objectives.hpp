#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbo/gp.hpp"

namespace cbo {

// Analytic test functions in their usual minimisation form.
double rastrigin(const Eigen::VectorXd& x);
double rosenbrock(const Eigen::VectorXd& x);
double ackley(const Eigen::VectorXd& x);
double schwefel(const Eigen::VectorXd& x);

struct KnownOptimum {
  Eigen::VectorXd point;
  double value = 0.0;
  /// Set when the optimum was located numerically rather than known exactly.
  bool approximate = false;
};

/// A benchmark problem framed for maximisation.
struct Objective {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> evaluate;  // noiseless truth
  BoxDomain domain;
  std::optional<KnownOptimum> known_optimum;
  /// max f - min f over a reference scan; scales the observation noise.
  double range_estimate = 1.0;
  /// Sampled objectives only: the prior draw the evaluator interpolates.
  Dataset anchors;
};

/// One of "rastrigin", "rosenbrock", "ackley", "schwefel" on its canonical
/// box, negated so that larger is better.
Objective analytic_objective(const std::string& name, int dim);

/// A draw from a zero-mean Matern-5/2 prior (unit signal variance) at 300*dim
/// LHS anchors on the unit cube, served through its noiseless interpolant.
Objective sample_gp_objective(int dim, double lengthscale, std::uint64_t seed);

struct NoisySpec {
  double noise_pct = 0.0;

  double sd(const Objective& objective) const {
    return noise_pct * objective.range_estimate;
  }
};

/// y = f(x) + eps with eps drawn from a stream keyed by (seed, eval_index).
class NoisyObservation {
 public:
  NoisyObservation(Objective objective, NoisySpec spec, std::uint64_t seed);

  double operator()(const Eigen::VectorXd& x, std::uint64_t eval_index) const;
  double truth(const Eigen::VectorXd& x) const { return objective_.evaluate(x); }
  double noise_sd() const { return sd_; }
  const Objective& objective() const { return objective_; }

 private:
  Objective objective_;
  double sd_ = 0.0;
  std::uint64_t seed_ = 0;
};

NoisyObservation make_noisy(const Objective& objective, const NoisySpec& spec,
                            std::uint64_t seed);

/// Best-so-far bookkeeping for one run. Entry 0 covers the initial design;
/// entry i covers the first i optimisation iterations.
struct RegretTrace {
  std::vector<double> best_so_far;
  std::vector<double> simple_regret;
  /// Running mean of the true values of every evaluation so far.
  std::vector<double> average_reward;
  bool approximate_optimum = false;

  /// `true_values` lists the noiseless value of every evaluation in order,
  /// the first `init_size` of which form the initial design.
  static RegretTrace from_evaluations(const std::vector<double>& true_values,
                                      std::size_t init_size, double optimum,
                                      bool approximate = false);
};

struct Curve {
  std::vector<double> mean;
  std::vector<double> sd;  // population standard deviation
};

struct RegretSummary {
  Curve simple_regret;
  Curve average_reward;
  std::size_t runs = 0;
};

/// Pointwise mean and standard deviation across equal-length traces.
RegretSummary regret_aggregate(const std::vector<RegretTrace>& traces);

}  // namespace cbo
