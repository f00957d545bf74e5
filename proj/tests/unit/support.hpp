#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "cbo/gp.hpp"
#include "cbo/random.hpp"

namespace cbo::testing {

// Small hand-rolled generators for property tests.
struct Gen {
  Rng rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * uniform01(rng); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
  }
  double normal() { return normals(rng); }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double lo = 0.0, double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  BoxDomain domain(Eigen::Index d) {
    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      lo[k] = uniform(-5.0, 5.0);
      hi[k] = lo[k] + uniform(0.5, 10.0);
    }
    return {lo, hi};
  }

  NormalSampler normals;
};

}  // namespace cbo::testing
