#include "cbo/serialization.hpp"

#include <cmath>
#include <limits>

#include "cbo/error.hpp"

namespace cbo {
namespace {

// JSON has no infinities; a null stands for -inf (singular log-determinants).
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  if (j.is_null()) return -std::numeric_limits<double>::infinity();
  return j.get<double>();
}

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

Json pareto_to_json(const ParetoArchive& archive) {
  Json entries = Json::array();
  for (const auto& e : archive.entries) {
    entries.push_back({{"decision", vector_to_json(e.decision)},
                       {"objectives", {number(e.objectives[0]), number(e.objectives[1])}}});
  }
  return entries;
}

ParetoArchive pareto_from_json(const Json& j) {
  ParetoArchive archive;
  for (const auto& e : j) {
    archive.entries.push_back(
        {vector_from_json(e.at("decision")),
         {number_from(e.at("objectives").at(0)), number_from(e.at("objectives").at(1))}});
  }
  return archive;
}

Json acquisition_to_json(const AcquisitionSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"beta", spec.beta},
          {"base", to_string(spec.base)},
          {"n_fantasies", spec.n_fantasies}};
}

AcquisitionSpec acquisition_from_json(const Json& j) {
  AcquisitionSpec spec;
  if (j.is_string()) {
    spec.kind = acquisition_kind_from_string(j.get<std::string>());
    return spec;
  }
  spec.kind = acquisition_kind_from_string(value_or<std::string>(j, "kind", "ei"));
  spec.beta = value_or(j, "beta", spec.beta);
  spec.base = acquisition_kind_from_string(value_or<std::string>(j, "base", "ei"));
  spec.n_fantasies = value_or(j, "n_fantasies", spec.n_fantasies);
  return spec;
}

}  // namespace

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() && !j[i].is_null()) {
      throw Error(ErrorCode::InvalidArgument, "expected a numeric array");
    }
    v[static_cast<Eigen::Index>(i)] = number_from(j[i]);
  }
  return v;
}

Json rows_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

Eigen::MatrixXd rows_from_json(const Json& j, Eigen::Index cols) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected an array of points");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd row = vector_from_json(j[i]);
    if (row.size() != cols) {
      throw Error(ErrorCode::InvalidArgument,
                  "point " + std::to_string(i) + " has " + std::to_string(row.size()) +
                      " coordinates, expected " + std::to_string(cols));
    }
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json to_json(const SessionConfig& c) {
  Json noise = c.noise.learned ? Json{{"mode", "learned"}}
                               : Json{{"mode", "fixed"}, {"variance", c.noise.variance}};
  return {{"schema_version", kSchemaVersion},
          {"domain", {{"lower", vector_to_json(c.domain.lower())},
                      {"upper", vector_to_json(c.domain.upper())}}},
          {"acquisition", acquisition_to_json(c.acquisition)},
          {"p", c.p},
          {"init_size", c.init_size},
          {"moo", {{"pop_size", c.moo.pop_size}, {"generations", c.moo.generations}}},
          {"kernel", {{"initial_lengthscale", c.initial_lengthscale},
                      {"restarts", c.gp_restarts}}},
          {"acquisition_starts", c.acquisition_starts},
          {"noise", noise},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed}};
}

SessionConfig config_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("domain")) {
      throw Error(ErrorCode::InvalidArgument, "config needs a domain");
    }
    SessionConfig c;
    c.domain = BoxDomain(vector_from_json(j.at("domain").at("lower")),
                         vector_from_json(j.at("domain").at("upper")));
    if (j.contains("acquisition")) c.acquisition = acquisition_from_json(j.at("acquisition"));
    c.p = value_or(j, "p", c.p);
    c.init_size = value_or(j, "init_size", c.init_size);
    if (j.contains("moo")) {
      c.moo.pop_size = value_or(j.at("moo"), "pop_size", c.moo.pop_size);
      c.moo.generations = value_or(j.at("moo"), "generations", c.moo.generations);
    }
    if (j.contains("kernel")) {
      c.initial_lengthscale =
          value_or(j.at("kernel"), "initial_lengthscale", c.initial_lengthscale);
      c.gp_restarts = value_or(j.at("kernel"), "restarts", c.gp_restarts);
    }
    c.acquisition_starts = value_or(j, "acquisition_starts", c.acquisition_starts);
    if (j.contains("noise")) {
      const Json& n = j.at("noise");
      const auto mode = value_or<std::string>(n, "mode", "fixed");
      if (mode == "learned") {
        c.noise = NoiseMode::learn();
      } else if (mode == "fixed") {
        c.noise = NoiseMode::fixed(value_or(n, "variance", 0.0));
      } else {
        throw Error(ErrorCode::InvalidArgument, "noise mode must be fixed or learned");
      }
    }
    c.max_iterations = value_or(j, "max_iterations", c.max_iterations);
    c.seed = value_or<std::uint64_t>(j, "seed", c.seed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed config: ") + e.what());
  }
}

ExpertSeedSet expert_seeds_from_json(const Json& j, Eigen::Index dim) {
  ExpertSeedSet seeds;
  seeds.points.resize(0, dim);
  if (j.is_null()) return seeds;
  try {
    if (j.is_array()) {
      seeds.points = rows_from_json(j, dim);
    } else {
      seeds.points = rows_from_json(j.at("points"), dim);
      if (j.contains("labels")) {
        seeds.labels = j.at("labels").get<std::vector<std::string>>();
        if (!seeds.labels.empty() &&
            seeds.labels.size() != static_cast<std::size_t>(seeds.points.rows())) {
          throw Error(ErrorCode::InvalidArgument, "one label per expert point required");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed expert seeds: ") + e.what());
  }
  return seeds;
}

Json to_json(const ExpertSeedSet& seeds) {
  return {{"points", rows_to_json(seeds.points)}, {"labels", seeds.labels}};
}

Json to_json(const AlternativeSet& set) {
  Json candidates = Json::array();
  for (const auto& c : set.candidates) {
    candidates.push_back({{"point", vector_to_json(c.point)},
                          {"utility", number(c.utility)},
                          {"predicted_mean", number(c.predicted_mean)},
                          {"predicted_sd", number(c.predicted_sd)},
                          {"is_utility_optimum", c.is_utility_optimum}});
  }
  return {{"iteration", set.iteration},
          {"candidates", candidates},
          {"knee", set.knee},
          {"pareto", pareto_to_json(set.pareto_snapshot)}};
}

AlternativeSet alternative_set_from_json(const Json& j) {
  AlternativeSet set;
  set.iteration = j.at("iteration").get<int>();
  set.knee = j.at("knee").get<int>();
  for (const auto& c : j.at("candidates")) {
    set.candidates.push_back({vector_from_json(c.at("point")),
                              number_from(c.at("utility")),
                              number_from(c.at("predicted_mean")),
                              number_from(c.at("predicted_sd")),
                              c.at("is_utility_optimum").get<bool>()});
  }
  set.pareto_snapshot = pareto_from_json(j.at("pareto"));
  return set;
}

Json to_json(const Session& s) {
  Json dataset = Json::array();
  for (Eigen::Index i = 0; i < s.dataset().size(); ++i) {
    dataset.push_back({{"x", vector_to_json(s.dataset().inputs.row(i).transpose())},
                       {"y", s.dataset().outputs[i]}});
  }
  Json audit = Json::array();
  for (const auto& r : s.audit_log()) {
    audit.push_back({{"iteration", r.iteration},
                     {"alternatives", to_json(r.alternatives)},
                     {"chosen_index", r.chosen_index},
                     {"chooser", r.chooser},
                     {"observation", r.observation ? Json(*r.observation) : Json(nullptr)},
                     {"chosen_at_ms", r.chosen_at_ms},
                     {"observed_at_ms", r.observed_at_ms}});
  }
  Json mask = Json::array();
  for (bool b : s.initial_design().expert_mask) mask.push_back(b);
  return {{"schema_version", kSchemaVersion},
          {"config", to_json(s.config())},
          {"expert_seeds", to_json(s.expert_seeds())},
          {"initial_design", {{"points", rows_to_json(s.initial_design().points)},
                              {"expert_mask", mask},
                              {"log_det", number(s.initial_design().log_det)}}},
          {"phase", to_string(s.phase())},
          {"iteration", s.iteration()},
          {"dataset", dataset},
          {"pending", s.pending() ? to_json(*s.pending()) : Json(nullptr)},
          {"awaiting_point",
           s.awaiting_point() ? vector_to_json(*s.awaiting_point()) : Json(nullptr)},
          {"audit", audit},
          {"rng_cursor", {{"seed", s.config().seed},
                          {"iteration", s.iteration()},
                          {"evaluations", s.dataset().size()}}}};
}

Session session_from_json(const Json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw Error(ErrorCode::InvalidArgument,
                  "unsupported session schema_version " + std::to_string(version));
    }
    SessionConfig config = config_from_json(j.at("config"));
    const Eigen::Index d = config.domain.dim();
    ExpertSeedSet expert = expert_seeds_from_json(j.at("expert_seeds"), d);

    DesignResult design;
    const Json& dj = j.at("initial_design");
    design.points = rows_from_json(dj.at("points"), d);
    design.expert_mask = dj.at("expert_mask").get<std::vector<bool>>();
    design.log_det = number_from(dj.at("log_det"));

    Dataset data;
    data.inputs.resize(0, d);
    for (const auto& row : j.at("dataset")) {
      data.append(vector_from_json(row.at("x")), row.at("y").get<double>());
    }

    std::optional<AlternativeSet> pending;
    if (!j.at("pending").is_null()) pending = alternative_set_from_json(j.at("pending"));
    std::optional<Eigen::VectorXd> awaiting;
    if (!j.at("awaiting_point").is_null()) awaiting = vector_from_json(j.at("awaiting_point"));

    std::vector<AuditRecord> audit;
    for (const auto& r : j.at("audit")) {
      AuditRecord rec;
      rec.iteration = r.at("iteration").get<int>();
      rec.alternatives = alternative_set_from_json(r.at("alternatives"));
      rec.chosen_index = r.at("chosen_index").get<std::size_t>();
      rec.chooser = r.at("chooser").get<std::string>();
      if (!r.at("observation").is_null()) rec.observation = r.at("observation").get<double>();
      rec.chosen_at_ms = r.at("chosen_at_ms").get<std::int64_t>();
      rec.observed_at_ms = r.at("observed_at_ms").get<std::int64_t>();
      audit.push_back(std::move(rec));
    }
    return Session::restore(std::move(config), std::move(expert), std::move(design),
                            phase_from_string(j.at("phase").get<std::string>()),
                            j.at("iteration").get<int>(), std::move(data),
                            std::move(pending), std::move(awaiting), std::move(audit));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed session: ") + e.what());
  }
}

std::string dump_session(const Session& session) {
  return to_json(session).dump(2);
}

}  // namespace cbo
