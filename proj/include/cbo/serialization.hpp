#pragma once

#include <json.hpp>

#include "cbo/alternatives.hpp"
#include "cbo/doe.hpp"
#include "cbo/engine.hpp"

namespace cbo {

using Json = nlohmann::json;

/// Bumped whenever a persisted or wire format changes incompatibly.
inline constexpr int kSchemaVersion = 1;

Json to_json(const SessionConfig& config);
/// Missing fields take their defaults; the domain is required.
SessionConfig config_from_json(const Json& j);

/// Accepts either a bare array of points or {"points": [...], "labels": [...]}.
ExpertSeedSet expert_seeds_from_json(const Json& j, Eigen::Index dim);
Json to_json(const ExpertSeedSet& seeds);

Json to_json(const AlternativeSet& set);
AlternativeSet alternative_set_from_json(const Json& j);

Json to_json(const Session& session);
Session session_from_json(const Json& j);

/// Canonical text form used for persistence and byte-level comparisons.
std::string dump_session(const Session& session);

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);
Json rows_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd rows_from_json(const Json& j, Eigen::Index cols);

}  // namespace cbo
