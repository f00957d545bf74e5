#include "cbo/doe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cbo/box_minimizer.hpp"
#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {

Eigen::MatrixXd latin_hypercube(Eigen::Index n, const BoxDomain& domain,
                                std::uint64_t seed, bool jitter) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "LHS size must be >= 1");
  const Eigen::Index d = domain.dim();
  Rng rng(seed);
  Eigen::MatrixXd unit(n, d);
  std::vector<Eigen::Index> strata(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with our own uniform draws keeps the design portable.
    for (std::size_t i = strata.size(); i > 1; --i) {
      const auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(strata[i - 1], strata[std::min(k, i - 1)]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double offset = jitter ? uniform01(rng) : 0.5;
      unit(i, j) = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + offset) /
                   static_cast<double>(n);
    }
  }
  return domain.rows_from_unit(unit);
}

KernelParams default_design_kernel(Eigen::Index dim) {
  return KernelParams::isotropic(dim, 0.2, 1.0);
}

double design_log_det(const Eigen::MatrixXd& points, const BoxDomain& domain,
                      const KernelParams& kernel) {
  const Eigen::MatrixXd unit = domain.rows_to_unit(points);
  return log_determinant(kernel_matrix(unit, unit, kernel));
}

DesignResult augment_design(const ExpertSeedSet& expert, Eigen::Index total,
                            const KernelParams& kernel, const BoxDomain& domain,
                            std::uint64_t seed, const AugmentOptions& options) {
  if (total < 1) throw Error(ErrorCode::InvalidArgument, "design size must be >= 1");
  kernel.validate();
  const Eigen::Index d = domain.dim();
  const Eigen::Index m = expert.size();
  if (m > 0 && expert.points.cols() != d) {
    throw Error(ErrorCode::InvalidArgument, "expert points have wrong dimension");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!domain.contains(expert.points.row(i).transpose())) {
      throw Error(ErrorCode::InvalidArgument,
                  "expert point " + std::to_string(i) + " lies outside the domain");
    }
  }

  DesignResult result;
  if (m >= total) {
    result.points = expert.points;
    result.expert_mask.assign(static_cast<std::size_t>(m), true);
    result.log_det = design_log_det(result.points, domain, kernel);
    return result;
  }

  const Eigen::Index free_rows = total - m;
  const Eigen::MatrixXd expert_unit =
      m > 0 ? domain.rows_to_unit(expert.points) : Eigen::MatrixXd(0, d);
  const BoxDomain unit_box = BoxDomain::unit(d);

  // Decision vector: free rows flattened row-major on the unit cube.
  auto assemble = [&](const Eigen::VectorXd& flat) {
    Eigen::MatrixXd all(total, d);
    if (m > 0) all.topRows(m) = expert_unit;
    for (Eigen::Index r = 0; r < free_rows; ++r) {
      all.row(m + r) = flat.segment(r * d, d).transpose();
    }
    return all;
  };
  auto negative_log_det = [&](const Eigen::VectorXd& flat) {
    const Eigen::MatrixXd all = assemble(flat);
    const double ld = log_determinant(kernel_matrix(all, all, kernel));
    return std::isfinite(ld) ? -ld : std::numeric_limits<double>::infinity();
  };

  const Eigen::Index n_vars = free_rows * d;
  const Eigen::VectorXd lower = Eigen::VectorXd::Zero(n_vars);
  const Eigen::VectorXd upper = Eigen::VectorXd::Ones(n_vars);
  const GradientObjective objective =
      with_finite_differences(negative_log_det, lower, upper, 1e-7);
  BoxMinimizerOptions opt;
  opt.max_iterations = options.max_iterations;

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_flat;
  for (int restart = 0; restart < std::max(options.restarts, 1); ++restart) {
    const Eigen::MatrixXd start_rows = latin_hypercube(
        free_rows, unit_box,
        derive_seed(seed, Stream::Design, static_cast<std::uint64_t>(restart)),
        true);
    Eigen::VectorXd start(n_vars);
    for (Eigen::Index r = 0; r < free_rows; ++r) {
      start.segment(r * d, d) = start_rows.row(r).transpose();
    }
    const BoxMinimizerResult res = minimize_in_box(objective, start, lower, upper, opt);
    if (std::isfinite(res.value) && res.value < best) {
      best = res.value;
      best_flat = res.x;
    }
  }
  if (best_flat.size() == 0) {
    throw Error(ErrorCode::DegenerateKernel,
                "kernel matrix of the augmented design is singular at every start");
  }

  Eigen::MatrixXd unit = assemble(best_flat);
  result.points.resize(total, d);
  if (m > 0) result.points.topRows(m) = expert.points;
  result.points.bottomRows(free_rows) =
      domain.rows_from_unit(unit.bottomRows(free_rows));
  result.expert_mask.assign(static_cast<std::size_t>(total), false);
  std::fill_n(result.expert_mask.begin(), m, true);
  result.log_det = design_log_det(result.points, domain, kernel);
  return result;
}

}  // namespace cbo
