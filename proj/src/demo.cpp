#include "cbo/demo.hpp"

#include "cbo/engine.hpp"
#include "cbo/random.hpp"

namespace cbo {

Json demo_onedim(const DemoOptions& o) {
  const Objective objective = sample_gp_objective(1, o.lengthscale, o.seed);
  SessionConfig config;
  config.domain = objective.domain;
  config.p = o.p;
  config.init_size = o.init_size;
  config.max_iterations = o.iterations;
  config.seed = o.seed;

  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(o.grid_points, 0.0, 1.0);
  Json truth = Json::array();
  for (double x : grid) truth.push_back(objective.evaluate(Eigen::VectorXd::Constant(1, x)));

  Session session = init_session(config);
  std::vector<double> initial;
  for (Eigen::Index i = 0; i < session.initial_design().points.rows(); ++i) {
    initial.push_back(objective.evaluate(session.initial_design().points.row(i).transpose()));
  }
  session.commit_initial_observations(initial);

  const auto chooser = ChoicePolicy::pbest(0.0);
  Json steps = Json::array();
  while (session.phase() == Phase::Proposing) {
    const Surrogate surrogate = session.surrogate();
    const Acquisition acq(config.acquisition, surrogate.model,
                          surrogate.ensemble ? &*surrogate.ensemble : nullptr);
    Json mean = Json::array(), sd = Json::array(), utility = Json::array();
    for (double x : grid) {
      const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x);
      const Prediction pr = surrogate.model.predict(v);
      mean.push_back(pr.mean);
      sd.push_back(pr.sd());
      utility.push_back(acq(v));
    }
    Json data{{"x", Json::array()}, {"y", Json::array()}};
    for (Eigen::Index i = 0; i < session.dataset().size(); ++i) {
      data["x"].push_back(session.dataset().inputs(i, 0));
      data["y"].push_back(session.dataset().outputs[i]);
    }

    const AlternativeSet& set = session.step_propose();
    std::vector<double> truths;
    for (const auto& c : set.candidates) truths.push_back(objective.evaluate(c.point));
    const std::size_t choice = select(
        chooser, set, truths,
        derive_seed(o.seed, Stream::Policy, static_cast<std::uint64_t>(session.iteration())));
    Json step = to_json(set);
    step["evaluations"] = session.dataset().size();
    step["dataset"] = data;
    step["posterior"] = {{"mean", mean}, {"sd", sd}};
    step["acquisition"] = utility;
    step["chosen_index"] = choice;
    session.commit_choice(choice, chooser.name());
    const double y = objective.evaluate(*session.awaiting_point());
    step["observation"] = y;
    session.commit_observation(y);
    steps.push_back(std::move(step));
  }

  return {{"schema_version", kSchemaVersion},
          {"objective", {{"kind", "gp_sample"},
                         {"lengthscale", o.lengthscale},
                         {"seed", o.seed},
                         {"optimum", {{"x", objective.known_optimum->point[0]},
                                      {"value", objective.known_optimum->value}}}}},
          {"grid", {{"x", vector_to_json(grid)}, {"truth", truth}}},
          {"config", to_json(config)},
          {"steps", steps}};
}

}  // namespace cbo
