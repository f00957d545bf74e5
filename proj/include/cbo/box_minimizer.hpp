#pragma once

#include <functional>

#include <Eigen/Core>

namespace cbo {

/// Objective with gradient: returns f(x) and writes df/dx into `grad`.
using GradientObjective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
using ScalarObjective = std::function<double(const Eigen::VectorXd& x)>;

struct BoxMinimizerOptions {
  int memory = 10;
  int max_iterations = 200;
  /// Stop when the relative decrease of f in one step falls below this.
  double function_tolerance = 1e-10;
  /// Stop when the infinity norm of the projected gradient falls below this.
  double gradient_tolerance = 1e-10;
  int max_line_search_steps = 30;
};

struct BoxMinimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Projected limited-memory BFGS on the box [lower, upper]. Curvature pairs
/// are restricted to the free variables; the line search backtracks along the
/// projection arc with an Armijo test. Non-finite values are treated as
/// rejected trial points, never as accepted iterates.
BoxMinimizerResult minimize_in_box(const GradientObjective& objective,
                                   const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   const BoxMinimizerOptions& options = {});

/// Wraps a value-only objective with a central finite-difference gradient
/// that falls back to one-sided differences at the box faces.
GradientObjective with_finite_differences(ScalarObjective objective,
                                          Eigen::VectorXd lower,
                                          Eigen::VectorXd upper,
                                          double step = 1e-6);

}  // namespace cbo
