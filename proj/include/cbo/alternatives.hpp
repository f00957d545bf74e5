#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cbo/acquisition.hpp"
#include "cbo/gp.hpp"
#include "cbo/moo.hpp"

namespace cbo {

struct Candidate {
  Eigen::VectorXd point;  // domain units
  double utility = 0.0;
  double predicted_mean = 0.0;
  double predicted_sd = 0.0;
  bool is_utility_optimum = false;
};

/// The choices offered at one iteration: knee alternatives first, the
/// acquisition optimum last.
struct AlternativeSet {
  std::vector<Candidate> candidates;
  /// Front the knee was picked from; decisions are flattened alternative
  /// rows in domain units, objectives are (batch utility, log variability).
  ParetoArchive pareto_snapshot;
  /// Index of the knee inside pareto_snapshot, or -1 when p == 1.
  int knee = -1;
  int iteration = 0;

  std::size_t size() const { return candidates.size(); }
  std::size_t optimum_index() const;
};

/// Log of the variability objective used in place of -inf for rank-deficient
/// batches so that NSGA-II sees finite values.
inline constexpr double kDegenerateLogVariability = -1e3;

/// Sum of utilities over the rows of `alternatives` (domain units).
double batch_utility(const Eigen::MatrixXd& alternatives,
                     const Acquisition& acquisition);
double batch_utility(const Eigen::MatrixXd& alternatives,
                     const AcquisitionSpec& spec, const GpModel& model,
                     const FantasyEnsemble* ensemble);

struct Variability {
  double det = 0.0;
  double log_det = 0.0;  // -inf when the kernel matrix is singular
};

/// Determinant of the kernel matrix over the alternatives plus x*. Points are
/// in the kernel's input space (the unit cube for fitted models).
Variability batch_variability(const Eigen::MatrixXd& alternatives,
                              const Eigen::VectorXd& x_star,
                              const KernelParams& kernel);

struct ProposeOptions {
  Nsga2Options moo;
  MaximizeOptions maximize;
};

/// Maximises the utility for x*, then (for p > 1) solves the bi-objective
/// batch problem over p-1 alternatives and assembles the knee set.
AlternativeSet propose(const GpModel& model, const FantasyEnsemble* ensemble,
                       const AcquisitionSpec& spec, const BoxDomain& domain,
                       int p, const ProposeOptions& options,
                       std::uint64_t seed);

}  // namespace cbo
