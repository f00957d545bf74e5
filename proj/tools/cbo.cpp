// Command-line front end: benchmarks, local-file sessions, the HTTP service and demos.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cbo/bench.hpp"
#include "cbo/demo.hpp"
#include "cbo/error.hpp"
#include "cbo/service.hpp"

namespace {

using cbo::Json;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cbo::Error(cbo::ErrorCode::NotFound, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw cbo::Error(cbo::ErrorCode::InvalidArgument, path + ": " + e.what());
  }
}

cbo::Session load_session(const std::string& path) {
  return cbo::session_from_json(read_json(path));
}

void save_session(const std::string& path, const cbo::Session& s) {
  std::ofstream os(path, std::ios::trunc);
  os << cbo::dump_session(s) << '\n';
  if (!os) throw cbo::Error(cbo::ErrorCode::InvalidArgument, "cannot write " + path);
}

std::string session_id(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

void print_view(const std::string& path, const cbo::Session& s) {
  std::cout << cbo::session_view(session_id(path), s).dump(2) << '\n';
}

std::pair<std::string, int> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) return {bind, 8080};
  return {bind.substr(0, colon), std::stoi(bind.substr(colon + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative Bayesian optimization: benchmarks, sessions and service", "cbo"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "Benchmark matrix runs and reports");
  bench->require_subcommand(1);
  std::string matrix_path, out_dir, report_dir;
  int parallel = 1;
  std::optional<std::uint64_t> bench_seed;
  auto* bench_run = bench->add_subcommand("run", "Run every cell of a benchmark matrix");
  bench_run->add_option("matrix", matrix_path, "Matrix JSON file")->required();
  bench_run->add_option("--out", out_dir, "Output directory")->required();
  bench_run->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  bench_run->add_option("--seed", bench_seed, "Override every cell's seed");
  auto* bench_report = bench->add_subcommand("report", "Aggregate traces into regret curves");
  bench_report->add_option("dir", report_dir, "Directory written by bench run")->required();

  auto* session = app.add_subcommand("session", "Local-file sessions");
  session->require_subcommand(1);
  std::string file, config_path, seeds_path, chooser = "human";
  std::vector<double> values;
  std::size_t index = 0;
  double y = 0.0;
  bool csv = false;
  auto* s_new = session->add_subcommand("new", "Create a session file from a config");
  s_new->add_option("file", file, "Session file to create")->required();
  s_new->add_option("--config", config_path, "Config JSON (or {config, expert_seeds})")
      ->required();
  s_new->add_option("--seeds", seeds_path, "Expert seed points JSON");
  auto* s_show = session->add_subcommand("show", "Print a session");
  s_show->add_option("file", file)->required();
  s_show->add_flag("--csv", csv, "Print the evaluation history as CSV");
  auto* s_init = session->add_subcommand("init", "Record observations of the initial design");
  s_init->add_option("file", file)->required();
  s_init->add_option("--values", values, "One value per design point")->required();
  auto* s_propose = session->add_subcommand("propose", "Compute the next alternative set");
  s_propose->add_option("file", file)->required();
  auto* s_choose = session->add_subcommand("choose", "Choose one pending alternative");
  s_choose->add_option("file", file)->required();
  s_choose->add_option("--index", index, "Candidate index")->required();
  s_choose->add_option("--chooser", chooser, "Chooser tag");
  auto* s_observe = session->add_subcommand("observe", "Record the chosen point's outcome");
  s_observe->add_option("file", file)->required();
  s_observe->add_option("--y", y, "Observed value")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string bind = "127.0.0.1:8080", state_dir, static_dir;
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--state-dir", state_dir,
                    std::string("Session directory (default $") + cbo::kStateDirEnv + ")");
  serve->add_option("--static", static_dir, "Directory of static assets to mount at /");

  auto* demo = app.add_subcommand("demo", "Worked examples");
  demo->require_subcommand(1);
  cbo::DemoOptions demo_options;
  std::string demo_out;
  auto* onedim = demo->add_subcommand("onedim", "One-dimensional walkthrough as JSON");
  onedim->add_option("--seed", demo_options.seed);
  onedim->add_option("--iterations", demo_options.iterations)->check(CLI::NonNegativeNumber);
  onedim->add_option("--p", demo_options.p)->check(CLI::PositiveNumber);
  onedim->add_option("--out", demo_out, "Write JSON here instead of stdout");

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "cbo: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "cbo: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*bench_run) {
      cbo::BenchOptions options{parallel, bench_seed};
      const Json summary = cbo::bench_run(read_json(matrix_path), out_dir, options);
      for (const auto& c : summary.at("cells")) {
        std::cout << c.at("id").get<std::string>() << ' ' << c.at("label").get<std::string>()
                  << " final simple regret " << c.at("final_simple_regret").at("mean")
                  << " +/- " << c.at("final_simple_regret").at("sd") << '\n';
      }
    } else if (*bench_report) {
      const Json plot = cbo::bench_report(report_dir);
      std::cout << "wrote " << plot.at("cells").size() << " regret curves to " << report_dir
                << '\n';
    } else if (*s_new) {
      const Json body = read_json(config_path);
      const Json config_json = body.contains("config") ? body.at("config") : body;
      const cbo::SessionConfig config = cbo::config_from_json(config_json);
      Json seeds_json = body.contains("expert_seeds") ? body.at("expert_seeds") : Json(nullptr);
      if (!seeds_path.empty()) seeds_json = read_json(seeds_path);
      const auto seeds = cbo::expert_seeds_from_json(seeds_json, config.domain.dim());
      const cbo::Session s = cbo::init_session(config, seeds);
      save_session(file, s);
      print_view(file, s);
    } else if (*s_show) {
      const cbo::Session s = load_session(file);
      if (csv) {
        std::cout << cbo::session_csv(session_id(file), s);
      } else {
        print_view(file, s);
      }
    } else if (*s_init || *s_propose || *s_choose || *s_observe) {
      cbo::Session s = load_session(file);
      if (*s_init) s.commit_initial_observations(values);
      if (*s_propose) s.step_propose();
      if (*s_choose) s.commit_choice(index, chooser);
      if (*s_observe) s.commit_observation(y);
      save_session(file, s);
      print_view(file, s);
    } else if (*serve) {
      if (state_dir.empty()) {
        const char* env = std::getenv(cbo::kStateDirEnv);
        state_dir = env ? env : "cbo-state";
      }
      cbo::ServiceOptions options;
      options.state_dir = state_dir;
      if (!static_dir.empty()) options.static_dir = static_dir;
      const auto [host, port] = split_bind(bind);
      std::cerr << "serving on " << host << ':' << port << ", state in " << state_dir << '\n';
      return cbo::serve(host, port, std::move(options));
    } else if (*onedim) {
      const std::string text = cbo::demo_onedim(demo_options).dump(2);
      if (demo_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream(demo_out) << text << '\n';
      }
    }
  } catch (const cbo::Error& e) {
    std::cerr << "cbo: " << cbo::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cbo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
