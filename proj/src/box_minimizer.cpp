#include "cbo/box_minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

namespace cbo {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// Zero components whose gradient pushes against an active bound.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)) {
      pg[i] = 0.0;
    }
  }
  return pg;
}

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<CurvaturePair>& memory,
                         const Eigen::VectorXd& gradient,
                         const Eigen::Array<bool, Eigen::Dynamic, 1>& free) {
  Eigen::VectorXd q = free.select(gradient, 0.0);
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    const auto& pair = memory[k];
    alpha[k] = pair.rho * free.select(pair.s, 0.0).dot(q);
    q -= alpha[k] * free.select(pair.y, 0.0);
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double yy = last.y.squaredNorm();
    if (yy > 0.0) q *= last.s.dot(last.y) / yy;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const auto& pair = memory[k];
    const double beta = pair.rho * free.select(pair.y, 0.0).dot(q);
    q += (alpha[k] - beta) * free.select(pair.s, 0.0);
  }
  return -free.select(q, 0.0);
}

}  // namespace

BoxMinimizerResult minimize_in_box(const GradientObjective& objective,
                                   const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   const BoxMinimizerOptions& options) {
  BoxMinimizerResult result;
  const Eigen::Index n = start.size();
  Eigen::VectorXd x = project(start, lower, upper);
  Eigen::VectorXd g(n);
  double f = objective(x, g);
  result.evaluations = 1;

  std::deque<CurvaturePair> memory;
  Eigen::VectorXd trial_g(n);

  if (!std::isfinite(f)) {
    result.x = x;
    result.value = f;
    return result;
  }

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::VectorXd pg = projected_gradient(x, g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    const Eigen::Array<bool, Eigen::Dynamic, 1> free = pg.array() != 0.0;

    Eigen::VectorXd direction = two_loop(memory, g, free);
    bool steepest = memory.empty();
    if (!(direction.dot(g) < 0.0)) {
      direction = -pg;
      steepest = true;
      memory.clear();
    }

    double step = 1.0;
    if (steepest) {
      // First trial moves each coordinate by at most one box width.
      const double width = (upper - lower).maxCoeff();
      step = std::min(1.0, width / pg.lpNorm<Eigen::Infinity>());
    }

    bool accepted = false;
    Eigen::VectorXd trial_x;
    double trial_f = 0.0;
    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      trial_x = project(x + step * direction, lower, upper);
      if ((trial_x - x).lpNorm<Eigen::Infinity>() == 0.0) break;
      trial_f = objective(trial_x, trial_g);
      ++result.evaluations;
      if (std::isfinite(trial_f) &&
          trial_f <= f + 1e-4 * g.dot(trial_x - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!steepest) {
        memory.clear();
        continue;
      }
      result.converged = true;
      break;
    }

    const Eigen::VectorXd s = trial_x - x;
    const Eigen::VectorXd y = trial_g - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
      memory.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }

    const double decrease = f - trial_f;
    x = std::move(trial_x);
    g = trial_g;
    f = trial_f;
    if (decrease <= options.function_tolerance *
                        std::max({std::abs(f), std::abs(f + decrease), 1.0})) {
      result.converged = true;
      break;
    }
  }

  result.x = std::move(x);
  result.value = f;
  return result;
}

GradientObjective with_finite_differences(ScalarObjective objective,
                                          Eigen::VectorXd lower,
                                          Eigen::VectorXd upper, double step) {
  return [objective = std::move(objective), lower = std::move(lower),
          upper = std::move(upper),
          step](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const double value = objective(x);
    grad.resize(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double hi = std::min(x[i] + step, upper[i]);
      const double lo = std::max(x[i] - step, lower[i]);
      if (hi <= lo) {
        grad[i] = 0.0;
        continue;
      }
      probe[i] = hi;
      const double f_hi = objective(probe);
      probe[i] = lo;
      const double f_lo = objective(probe);
      probe[i] = x[i];
      grad[i] = (f_hi - f_lo) / (hi - lo);
      if (!std::isfinite(grad[i])) grad[i] = 0.0;
    }
    return value;
  };
}

}  // namespace cbo
