#include "cbo/service.hpp"

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <regex>
#include <sstream>

#include "cbo/error.hpp"

namespace cbo {
namespace {

const std::regex kIdPattern("[A-Za-z0-9_-]{1,64}");

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::IllegalPhase: return 409;
    case ErrorCode::InvalidArgument:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::NonFiniteObservation:
    case ErrorCode::LengthMismatch:
    case ErrorCode::EmptyDataset:
    case ErrorCode::MissingTruth:
    case ErrorCode::MissingEnsemble: return 422;
    case ErrorCode::SingularGram:
    case ErrorCode::DegenerateKernel: return 500;
  }
  return 500;
}

HttpReply json_reply(int status, const Json& body) { return {status, body.dump(2), "application/json"}; }

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

std::string random_id() {
  std::random_device rd;
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(8) << rd() << std::setw(8) << rd();
  return os.str();
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Json session_view(const std::string& id, const Session& s) {
  Json view{{"schema_version", kSchemaVersion},
            {"id", id},
            {"phase", to_string(s.phase())},
            {"iteration", s.iteration()},
            {"max_iterations", s.config().max_iterations},
            {"p", s.config().p},
            {"domain", {{"lower", vector_to_json(s.config().domain.lower())},
                        {"upper", vector_to_json(s.config().domain.upper())}}}};

  Json mask = Json::array();
  for (bool b : s.initial_design().expert_mask) mask.push_back(b);
  const auto t = s.initial_design().points.rows();
  Json init_values = Json::array();
  if (s.dataset().size() >= t) {
    for (Eigen::Index i = 0; i < t; ++i) init_values.push_back(s.dataset().outputs[i]);
  }
  view["initial_design"] = {{"points", rows_to_json(s.initial_design().points)},
                            {"expert_mask", mask},
                            {"observations", init_values}};

  if (s.phase() == Phase::AwaitingChoice && s.pending()) {
    Json candidates = Json::array();
    const auto& set = *s.pending();
    for (std::size_t i = 0; i < set.candidates.size(); ++i) {
      const auto& c = set.candidates[i];
      candidates.push_back({{"index", i},
                            {"point", vector_to_json(c.point)},
                            {"utility", c.utility},
                            {"predicted_mean", c.predicted_mean},
                            {"predicted_sd", c.predicted_sd},
                            {"is_utility_optimum", c.is_utility_optimum}});
    }
    view["pending"] = {{"iteration", set.iteration}, {"candidates", candidates}};
  } else {
    view["pending"] = nullptr;
  }
  view["awaiting_point"] = s.phase() == Phase::AwaitingObservation && s.awaiting_point()
                               ? vector_to_json(*s.awaiting_point())
                               : Json(nullptr);

  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < std::min(t, s.dataset().size()); ++i) {
    best = std::max(best, s.dataset().outputs[i]);
  }
  Json history = Json::array();
  for (const auto& r : s.audit_log()) {
    if (r.observation) best = std::max(best, *r.observation);
    history.push_back(
        {{"iteration", r.iteration},
         {"chosen_index", r.chosen_index},
         {"chooser", r.chooser},
         {"point", vector_to_json(r.alternatives.candidates.at(r.chosen_index).point)},
         {"y", r.observation ? Json(*r.observation) : Json(nullptr)},
         {"best_so_far", std::isfinite(best) ? Json(best) : Json(nullptr)}});
  }
  view["history"] = history;
  return view;
}

std::string session_csv(const std::string& id, const Session& s) {
  std::ostringstream os;
  const Eigen::Index d = s.config().domain.dim();
  os << "run_id,iteration,chosen_index";
  for (Eigen::Index k = 0; k < d; ++k) os << ",x" << k;
  os << ",y_observed,best_observed,chooser\n";
  const Eigen::Index t = s.initial_design().points.rows();
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.dataset().size(); ++i) {
    const bool init = i < t;
    best = std::max(best, s.dataset().outputs[i]);
    const auto* record = init ? nullptr : &s.audit_log().at(static_cast<std::size_t>(i - t));
    os << id << ',' << (init ? 0 : record->iteration) << ','
       << (init ? -1 : static_cast<long>(record->chosen_index));
    for (Eigen::Index k = 0; k < d; ++k) os << ',' << format(s.dataset().inputs(i, k));
    os << ',' << format(s.dataset().outputs[i]) << ',' << format(best) << ','
       << (init ? "design" : record->chooser) << '\n';
  }
  return os.str();
}

HttpReply error_reply(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return json_reply(status_for(err->code()),
                      {{"code", std::string(to_string(err->code()))}, {"message", err->what()}});
  }
  return json_reply(500, {{"code", "Internal"}, {"message", e.what()}});
}

SessionService::Entry::Entry(Session s)
    : session(std::move(s)), snapshot(std::make_shared<const Session>(session)) {}

std::shared_ptr<const Session> SessionService::Entry::current() {
  std::lock_guard lock(snapshot_mutex);
  return snapshot;
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {
  if (options_.state_dir.empty()) throw Error(ErrorCode::InvalidArgument, "state directory required");
  std::filesystem::create_directories(options_.state_dir);
  if (!options_.new_id) options_.new_id = random_id;
  if (!options_.clock) options_.clock = system_clock();
}

std::filesystem::path SessionService::session_path(const std::string& id) const {
  return options_.state_dir / (id + ".json");
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) {
  if (!std::regex_match(id, kIdPattern)) throw Error(ErrorCode::NotFound, "no session " + id);
  std::lock_guard lock(registry_mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  std::ifstream in(session_path(id));
  if (!in) throw Error(ErrorCode::NotFound, "no session " + id);
  Session s = session_from_json(Json::parse(in));
  s.set_clock(options_.clock);
  auto entry = std::make_shared<Entry>(std::move(s));
  sessions_.emplace(id, entry);
  return entry;
}

void SessionService::persist(const std::string& id, Entry& entry) {
  const auto path = session_path(id);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    os << dump_session(entry.session) << '\n';
    if (!os) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
  auto snap = std::make_shared<const Session>(entry.session);
  std::lock_guard lock(entry.snapshot_mutex);
  entry.snapshot = std::move(snap);
}

template <typename F>
HttpReply SessionService::mutate(const std::string& id, F&& f) {
  try {
    auto entry = find(id);
    std::lock_guard lock(entry->write);
    Session working = entry->session;
    f(working);
    entry->session = std::move(working);
    persist(id, *entry);
    return json_reply(200, session_view(id, entry->session));
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

HttpReply SessionService::create(const std::string& body) {
  try {
    const Json j = parse_body(body);
    if (!j.contains("config")) throw Error(ErrorCode::InvalidArgument, "body needs a config");
    const SessionConfig config = config_from_json(j.at("config"));
    const ExpertSeedSet seeds = expert_seeds_from_json(
        j.contains("expert_seeds") ? j.at("expert_seeds") : Json(nullptr), config.domain.dim());
    Session s = init_session(config, seeds);
    s.set_clock(options_.clock);

    std::string id;
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(registry_mutex_);
      do {
        id = options_.new_id();
      } while (sessions_.count(id) || std::filesystem::exists(session_path(id)));
      entry = std::make_shared<Entry>(std::move(s));
      sessions_.emplace(id, entry);
    }
    std::lock_guard lock(entry->write);
    persist(id, *entry);
    return json_reply(201, {{"id", id}, {"session", session_view(id, entry->session)}});
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

HttpReply SessionService::show(const std::string& id) {
  try {
    return json_reply(200, session_view(id, *find(id)->current()));
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

HttpReply SessionService::init_observations(const std::string& id, const std::string& body) {
  return mutate(id, [&](Session& s) {
    const Json j = parse_body(body);
    const Json& values = j.is_array() ? j : j.value("values", Json(nullptr));
    if (!values.is_array()) throw Error(ErrorCode::InvalidArgument, "body needs a values array");
    std::vector<double> ys;
    for (const auto& v : values) {
      if (!v.is_number()) throw Error(ErrorCode::NonFiniteObservation, "observations must be numbers");
      ys.push_back(v.get<double>());
    }
    s.commit_initial_observations(ys);
  });
}

HttpReply SessionService::propose(const std::string& id) {
  return mutate(id, [](Session& s) { s.step_propose(); });
}

HttpReply SessionService::choice(const std::string& id, const std::string& body) {
  return mutate(id, [&](Session& s) {
    const Json j = parse_body(body);
    if (!j.contains("index") || !j.at("index").is_number_integer()) {
      throw Error(ErrorCode::InvalidArgument, "body needs an integer index");
    }
    const auto index = j.at("index").get<std::int64_t>();
    if (index < 0) throw Error(ErrorCode::IndexOutOfRange, "index must be non-negative");
    const auto chooser = j.value("chooser", std::string("human"));
    s.commit_choice(static_cast<std::size_t>(index), chooser);
  });
}

HttpReply SessionService::observation(const std::string& id, const std::string& body) {
  return mutate(id, [&](Session& s) {
    const Json j = parse_body(body);
    if (!j.contains("y") || !j.at("y").is_number()) {
      throw Error(ErrorCode::NonFiniteObservation, "body needs a numeric y");
    }
    s.commit_observation(j.at("y").get<double>());
  });
}

HttpReply SessionService::export_csv(const std::string& id) {
  try {
    return {200, session_csv(id, *find(id)->current()), "text/csv"};
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

void install_routes(httplib::Server& server, SessionService& service) {
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(Json{{"status", "ok"}, {"schema_version", kSchemaVersion}}.dump(),
                    "application/json");
  });
  server.Post("/sessions", [&, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create(req.body));
  });
  server.Get(R"(/sessions/([^/]+))", [&, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.show(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/init-observations)",
              [&, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.init_observations(req.matches[1], req.body));
              });
  server.Post(R"(/sessions/([^/]+)/propose)",
              [&, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.propose(req.matches[1]));
              });
  server.Post(R"(/sessions/([^/]+)/choice)",
              [&, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.choice(req.matches[1], req.body));
              });
  server.Post(R"(/sessions/([^/]+)/observation)",
              [&, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.observation(req.matches[1], req.body));
              });
  server.Get(R"(/sessions/([^/]+)/export\.csv)",
             [&, send](const httplib::Request& req, httplib::Response& res) {
               send(res, service.export_csv(req.matches[1]));
             });
  if (service.options().static_dir) {
    server.set_mount_point("/", service.options().static_dir->string());
  }
}

int serve(const std::string& host, int port, ServiceOptions options) {
  SessionService service(std::move(options));
  httplib::Server server;
  install_routes(server, service);
  if (!server.listen(host, port)) return 1;
  return 0;
}

}  // namespace cbo
