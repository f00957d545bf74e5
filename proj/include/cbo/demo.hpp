#pragma once

#include <cstdint>

#include "cbo/serialization.hpp"

namespace cbo {

struct DemoOptions {
  double lengthscale = 0.5;
  int init_size = 5;
  int p = 3;
  int iterations = 1;
  int grid_points = 201;
  std::uint64_t seed = 7;
};

/// One-dimensional walkthrough on a GP-prior sample with a random chooser: the
/// objective, posterior, acquisition, Pareto front and offered alternatives per step.
Json demo_onedim(const DemoOptions& options = {});

}  // namespace cbo
