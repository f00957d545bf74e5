#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbo/gp.hpp"

namespace cbo {

/// Points an expert wants evaluated before optimisation starts, one per row.
struct ExpertSeedSet {
  Eigen::MatrixXd points;
  std::vector<std::string> labels;  // optional, empty or one per point

  Eigen::Index size() const { return points.rows(); }
};

struct DesignResult {
  Eigen::MatrixXd points;
  std::vector<bool> expert_mask;
  double log_det = 0.0;
};

/// Latin hypercube with `n` rows in domain units. Each coordinate takes one
/// value per stratum; by default the stratum midpoint, or a uniform position
/// inside the stratum when `jitter` is set.
Eigen::MatrixXd latin_hypercube(Eigen::Index n, const BoxDomain& domain,
                                std::uint64_t seed, bool jitter = false);

/// Kernel used to spread the initial design before any data exists.
KernelParams default_design_kernel(Eigen::Index dim);

/// log|K| of the design, with points mapped to the unit cube. -inf when the
/// kernel matrix is singular (repeated points).
double design_log_det(const Eigen::MatrixXd& points, const BoxDomain& domain,
                      const KernelParams& kernel);

struct AugmentOptions {
  int restarts = 16;
  int max_iterations = 200;
};

/// Completes `expert` to `total` rows by maximising log|K| over the free rows
/// with the expert rows held fixed. Expert rows come first in the output.
DesignResult augment_design(const ExpertSeedSet& expert, Eigen::Index total,
                            const KernelParams& kernel, const BoxDomain& domain,
                            std::uint64_t seed,
                            const AugmentOptions& options = {});

}  // namespace cbo
