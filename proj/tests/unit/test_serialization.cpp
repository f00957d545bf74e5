#include <gtest/gtest.h>

#include "cbo/error.hpp"
#include "cbo/serialization.hpp"

using namespace cbo;

namespace {

SessionConfig small_config() {
  SessionConfig c;
  c.domain = BoxDomain(Eigen::Vector2d(0, -1), Eigen::Vector2d(1, 1));
  c.p = 2;
  c.init_size = 4;
  c.max_iterations = 3;
  c.acquisition_starts = 16;
  c.gp_restarts = 2;
  c.moo.pop_size = 12;
  c.moo.generations = 5;
  c.seed = 0xFFFFFFFFFFFFFFF0ULL;
  return c;
}

void expect_round_trip(const Session& s) {
  const std::string first = dump_session(s);
  const std::string second = dump_session(session_from_json(Json::parse(first)));
  EXPECT_EQ(first, second);
}

}  // namespace

TEST(Serialization, RoundTripInEveryPhase) {
  Session s = init_session(small_config());
  s.set_clock([n = std::int64_t{1000}]() mutable { return n += 7; });
  expect_round_trip(s);
  s.commit_initial_observations({0.1, -0.3, 1e-300, 12345.678901234567});
  expect_round_trip(s);
  s.step_propose();
  expect_round_trip(s);
  s.commit_choice(1, "alice");
  expect_round_trip(s);
  s.commit_observation(0.123456789012345678);
  expect_round_trip(s);
  while (s.phase() != Phase::Done) {
    s.step_propose();
    s.commit_choice(0, "bob");
    s.commit_observation(-2.5);
  }
  expect_round_trip(s);
  const Json j = to_json(s);
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.at("rng_cursor").at("evaluations"), 7);
  EXPECT_EQ(j.at("config").at("seed").get<std::uint64_t>(), 0xFFFFFFFFFFFFFFF0ULL);
}

TEST(Serialization, RestoredSessionContinuesIdentically) {
  Session a = init_session(small_config());
  a.commit_initial_observations({0.1, -0.3, 0.2, 0.0});
  Session b = session_from_json(to_json(a));
  EXPECT_EQ(to_json(a.step_propose()).dump(), to_json(b.step_propose()).dump());
}

TEST(Serialization, SingularDesignLogDetIsNull) {
  SessionConfig c = small_config();
  c.init_size = 2;
  ExpertSeedSet e{Eigen::MatrixXd::Constant(2, 2, 0.5), {"a", "b"}};
  const Session s = init_session(c, e);
  const Json j = to_json(s);
  EXPECT_TRUE(j.at("initial_design").at("log_det").is_null());
  const Session back = session_from_json(j);
  EXPECT_EQ(back.initial_design().log_det, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(back.expert_seeds().labels, e.labels);
  expect_round_trip(s);
}

TEST(Serialization, MinimalConfigTakesDefaults) {
  const auto c = config_from_json(Json::parse(R"({"domain": {"lower": [0], "upper": [2]}})"));
  EXPECT_EQ(c.p, 4);
  EXPECT_EQ(c.init_size, 8);
  EXPECT_EQ(c.max_iterations, 48);
  EXPECT_EQ(c.moo.pop_size, 50);
  EXPECT_EQ(c.acquisition.kind, AcquisitionSpec::Kind::EI);
  EXPECT_FALSE(c.noise.learned);
  const auto n = config_from_json(Json::parse(
      R"({"domain": {"lower": [0], "upper": [2]}, "acquisition": "noisy_ei",
          "noise": {"mode": "learned"}})"));
  EXPECT_EQ(n.acquisition.kind, AcquisitionSpec::Kind::NoisyEI);
  EXPECT_TRUE(n.noise.learned);
}

TEST(Serialization, ConfigRoundTrip) {
  SessionConfig c = small_config();
  c.acquisition = AcquisitionSpec::noisy(AcquisitionSpec::Kind::UCB, 5, 1.5);
  c.noise = NoiseMode::fixed(0.01);
  EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
}

TEST(Serialization, RejectsMalformedInput) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"p": 3})")), Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"domain": {"lower": [0], "upper": [2]}, "p": 0})")),
               Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"domain": {"lower": [0, 1], "upper": [2]}})")),
               Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"domain": {"lower": ["a"], "upper": [2]}})")),
               Error);
  Json s = to_json(init_session(small_config()));
  s["schema_version"] = 99;
  EXPECT_THROW(session_from_json(s), Error);
  EXPECT_THROW(expert_seeds_from_json(Json::parse("[[0.1]]"), 2), Error);
}

TEST(Serialization, ExpertSeedForms) {
  const auto a = expert_seeds_from_json(Json::parse("[[0.1, 0.2], [0.3, 0.4]]"), 2);
  const auto b = expert_seeds_from_json(
      Json::parse(R"({"points": [[0.1, 0.2], [0.3, 0.4]], "labels": ["x", "y"]})"), 2);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(b.labels, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(expert_seeds_from_json(Json(nullptr), 2).size(), 0);
}
