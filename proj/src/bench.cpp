#include "cbo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {
namespace {

std::vector<Json> as_list(const Json& matrix, const char* key, Json fallback) {
  if (!matrix.contains(key)) return {std::move(fallback)};
  const Json& v = matrix.at(key);
  if (v.is_array()) {
    if (v.empty()) throw Error(ErrorCode::InvalidArgument, std::string("empty list for ") + key);
    return {v.begin(), v.end()};
  }
  return {v};
}

std::string cell_id(std::size_t index) {
  std::ostringstream os;
  os << 'c' << std::setw(3) << std::setfill('0') << index;
  return os.str();
}

std::string run_id(std::size_t cell, int repeat) {
  std::ostringstream os;
  os << cell_id(cell) << "_r" << std::setw(3) << std::setfill('0') << repeat;
  return os.str();
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Json curve_json(const Curve& c) { return {{"mean", c.mean}, {"sd", c.sd}}; }

}  // namespace

std::string BenchCell::label() const {
  std::ostringstream os;
  os << function << "_d" << dim << "_n" << noise_pct << '_' << to_string(acquisition) << "_p"
     << p << '_' << policy.name();
  return os.str();
}

Json BenchCell::to_json() const {
  return {{"function", function},     {"d", dim},
          {"noise_pct", noise_pct},   {"acquisition", to_string(acquisition)},
          {"p", p},                   {"policy", policy.name()},
          {"iterations", iterations}, {"repeats", repeats},
          {"init_size", init_size},   {"seed", seed},
          {"lengthscale", lengthscale}};
}

std::vector<BenchCell> expand_matrix(const Json& matrix) {
  if (!matrix.is_object()) throw Error(ErrorCode::InvalidArgument, "matrix must be an object");
  try {
    const auto functions = as_list(matrix, "function", "ackley");
    const auto dims = as_list(matrix, "d", 2);
    const auto noises = as_list(matrix, "noise_pct", 0.0);
    const auto acqs = as_list(matrix, "acquisition", "ei");
    const auto ps = as_list(matrix, "p", 4);
    const auto policies = as_list(matrix, "policy", "expert");
    const auto lengthscales = as_list(matrix, "lengthscale", 0.05);

    std::vector<BenchCell> cells;
    for (const auto& f : functions)
      for (const auto& d : dims)
        for (const auto& n : noises)
          for (const auto& a : acqs)
            for (const auto& p : ps)
              for (const auto& pol : policies)
                for (const auto& l : lengthscales) {
                  BenchCell c;
                  c.function = f.get<std::string>();
                  c.dim = d.get<int>();
                  c.noise_pct = n.get<double>();
                  c.acquisition = acquisition_kind_from_string(a.get<std::string>());
                  c.p = p.get<int>();
                  c.policy = ChoicePolicy::parse(pol.get<std::string>());
                  c.lengthscale = l.get<double>();
                  c.iterations = matrix.value("iterations", 48);
                  c.repeats = matrix.value("repeats", c.function == "gp_sample" ? 50 : 32);
                  c.init_size = matrix.value("init_size", 8);
                  c.seed = matrix.value("seed", std::uint64_t{0});
                  if (c.noise_pct < 0.0 || c.p < 1 || c.iterations < 0 || c.repeats < 1 ||
                      c.init_size < 1 || c.lengthscale <= 0.0) {
                    throw Error(ErrorCode::InvalidArgument, "invalid cell " + c.label());
                  }
                  cells.push_back(std::move(c));
                }
    return cells;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed matrix: ") + e.what());
  }
}

Objective objective_for(const BenchCell& cell, int repeat) {
  if (cell.function == "gp_sample") {
    return sample_gp_objective(
        cell.dim, cell.lengthscale,
        derive_seed(cell.seed, {hash_name("gp_sample"), static_cast<std::uint64_t>(cell.dim),
                                static_cast<std::uint64_t>(repeat)}));
  }
  return analytic_objective(cell.function, cell.dim);
}

SessionConfig session_config_for(const BenchCell& cell, const Objective& objective) {
  SessionConfig c;
  c.domain = objective.domain;
  c.p = cell.p;
  c.init_size = cell.init_size;
  c.max_iterations = cell.iterations;
  if (cell.noise_pct > 0.0) {
    c.noise = NoiseMode::learn();
    c.acquisition = AcquisitionSpec::noisy(
        cell.acquisition == AcquisitionSpec::Kind::NoisyEI ? AcquisitionSpec::Kind::EI
                                                           : cell.acquisition);
  } else {
    c.acquisition.kind = cell.acquisition == AcquisitionSpec::Kind::NoisyEI
                             ? AcquisitionSpec::Kind::EI
                             : cell.acquisition;
  }
  return c;
}

void write_trace_csv(std::ostream& os, const std::string& id, const AutonomousRun& run,
                     double optimum) {
  const Session& s = run.session;
  const Eigen::Index d = s.config().domain.dim();
  os << "run_id,iteration,chosen_index";
  for (Eigen::Index k = 0; k < d; ++k) os << ",x" << k;
  os << ",y_observed,y_true,best_true,simple_regret\n";

  const auto t = static_cast<std::size_t>(s.initial_design().points.rows());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < run.true_values.size(); ++i) {
    const bool init = i < t;
    const int iteration = init ? 0 : static_cast<int>(i - t) + 1;
    const long chosen = init ? -1 : static_cast<long>(s.audit_log()[i - t].chosen_index);
    best = std::max(best, run.true_values[i]);
    os << id << ',' << iteration << ',' << chosen;
    for (Eigen::Index k = 0; k < d; ++k) {
      os << ',' << format(s.dataset().inputs(static_cast<Eigen::Index>(i), k));
    }
    os << ',' << format(run.observed_values[i]) << ',' << format(run.true_values[i]) << ','
       << format(best) << ',' << format(optimum - best) << '\n';
  }
}

Json bench_run(const Json& matrix, const std::filesystem::path& out,
               const BenchOptions& options) {
  auto cells = expand_matrix(matrix);
  if (options.seed) {
    for (auto& c : cells) c.seed = *options.seed;
  }
  std::filesystem::create_directories(out);

  struct Job {
    std::size_t cell;
    int repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int r = 0; r < cells[c].repeats; ++r) jobs.push_back({c, r});
  }

  std::vector<Json> run_entries(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const auto& cell = cells[jobs[j].cell];
        const int repeat = jobs[j].repeat;
        const Objective objective = objective_for(cell, repeat);
        SessionConfig config = session_config_for(cell, objective);
        const std::uint64_t run_seed =
            derive_seed(cell.seed, {static_cast<std::uint64_t>(jobs[j].cell),
                                    static_cast<std::uint64_t>(repeat)});
        config.seed = run_seed;
        const auto observe = make_noisy(objective, {cell.noise_pct}, run_seed);
        const AutonomousRun run = run_autonomous(config, observe, cell.policy, run_seed);

        const std::string id = run_id(jobs[j].cell, repeat);
        const std::string file = "trace_" + id + ".csv";
        std::ofstream os(out / file);
        write_trace_csv(os, id, run, objective.known_optimum->value);
        if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + (out / file).string());
        run_entries[j] = {{"run_id", id},
                          {"cell", cell_id(jobs[j].cell)},
                          {"repeat", repeat},
                          {"seed", run_seed},
                          {"file", file},
                          {"optimum", objective.known_optimum->value},
                          {"approximate_optimum", objective.known_optimum->approximate},
                          {"final_simple_regret", run.trace.simple_regret.back()}};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const int threads = std::max(1, options.parallel);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  Json summary{{"schema_version", kSchemaVersion}, {"cells", Json::array()}};
  std::size_t j = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Json cell = cells[c].to_json();
    cell["id"] = cell_id(c);
    cell["label"] = cells[c].label();
    cell["runs"] = Json::array();
    std::vector<double> finals;
    for (int r = 0; r < cells[c].repeats; ++r, ++j) {
      finals.push_back(run_entries[j]["final_simple_regret"].get<double>());
      cell["runs"].push_back(run_entries[j]);
    }
    double mean = 0.0;
    for (double v : finals) mean += v;
    mean /= static_cast<double>(finals.size());
    double ss = 0.0;
    for (double v : finals) ss += (v - mean) * (v - mean);
    cell["final_simple_regret"] = {{"mean", mean},
                                   {"sd", std::sqrt(ss / static_cast<double>(finals.size()))}};
    summary["cells"].push_back(std::move(cell));
  }
  std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
  return summary;
}

Json bench_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "summary.json");
  if (!in) throw Error(ErrorCode::NotFound, "no summary.json in " + dir.string());
  Json summary;
  try {
    summary = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed summary.json: ") + e.what());
  }

  Json plot{{"schema_version", kSchemaVersion}, {"cells", Json::array()}};
  for (const auto& cell : summary.at("cells")) {
    std::vector<RegretTrace> traces;
    bool approximate = false;
    const auto init_size = cell.at("init_size").get<std::size_t>();
    for (const auto& run : cell.at("runs")) {
      std::ifstream csv(dir / run.at("file").get<std::string>());
      if (!csv) throw Error(ErrorCode::NotFound, "missing trace " + run.at("file").get<std::string>());
      std::string line;
      std::getline(csv, line);
      const auto header = split_csv(line);
      const auto col = std::find(header.begin(), header.end(), "y_true") - header.begin();
      if (col == static_cast<long>(header.size())) {
        throw Error(ErrorCode::InvalidArgument, "trace lacks a y_true column");
      }
      std::vector<double> truths;
      while (std::getline(csv, line)) {
        if (line.empty()) continue;
        truths.push_back(std::stod(split_csv(line).at(static_cast<std::size_t>(col))));
      }
      approximate = approximate || run.value("approximate_optimum", false);
      traces.push_back(RegretTrace::from_evaluations(truths, init_size,
                                                     run.at("optimum").get<double>(),
                                                     run.value("approximate_optimum", false)));
    }
    const RegretSummary agg = regret_aggregate(traces);
    const std::string id = cell.at("id").get<std::string>();

    std::ofstream os(dir / ("regret_" + id + ".csv"));
    os << "iteration,simple_regret_mean,simple_regret_sd,average_reward_mean,average_reward_sd\n";
    for (std::size_t t = 0; t < agg.simple_regret.mean.size(); ++t) {
      os << t << ',' << format(agg.simple_regret.mean[t]) << ','
         << format(agg.simple_regret.sd[t]) << ',' << format(agg.average_reward.mean[t]) << ','
         << format(agg.average_reward.sd[t]) << '\n';
    }
    plot["cells"].push_back({{"id", id},
                             {"label", cell.at("label")},
                             {"runs", agg.runs},
                             {"approximate_optimum", approximate},
                             {"simple_regret", curve_json(agg.simple_regret)},
                             {"average_reward", curve_json(agg.average_reward)}});
  }
  std::ofstream(dir / "plot_data.json") << plot.dump(2) << '\n';
  return plot;
}

}  // namespace cbo
