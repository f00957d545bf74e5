#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cbo/engine.hpp"
#include "cbo/serialization.hpp"

namespace cbo {

/// One point of the benchmark matrix; every run in a cell shares these settings.
struct BenchCell {
  std::string function = "ackley";  // rastrigin | rosenbrock | ackley | schwefel | gp_sample
  int dim = 2;
  double noise_pct = 0.0;
  AcquisitionSpec::Kind acquisition = AcquisitionSpec::Kind::EI;
  int p = 4;
  ChoicePolicy policy = ChoicePolicy::expert();
  int iterations = 48;
  int repeats = 32;
  int init_size = 8;
  std::uint64_t seed = 0;
  double lengthscale = 0.05;

  std::string label() const;
  Json to_json() const;
};

/// Scalar or array fields; arrays expand into the cartesian product of cells.
std::vector<BenchCell> expand_matrix(const Json& matrix);

SessionConfig session_config_for(const BenchCell& cell, const Objective& objective);
Objective objective_for(const BenchCell& cell, int repeat);

struct BenchOptions {
  int parallel = 1;
  std::optional<std::uint64_t> seed;  // overrides every cell's seed
};

/// Writes one trace CSV per run plus summary.json into `out`; returns the summary.
Json bench_run(const Json& matrix, const std::filesystem::path& out,
               const BenchOptions& options = {});

void write_trace_csv(std::ostream& os, const std::string& run_id,
                     const AutonomousRun& run, double optimum);

/// Rebuilds traces from the CSVs named in summary.json and writes the aggregated
/// regret_<cell>.csv files and plot_data.json. Returns the plot data.
Json bench_report(const std::filesystem::path& dir);

}  // namespace cbo
