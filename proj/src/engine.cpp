#include "cbo/engine.hpp"

#include <chrono>
#include <cmath>

#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {

void SessionConfig::validate() const {
  if (domain.dim() < 1) throw Error(ErrorCode::InvalidArgument, "config needs a domain");
  acquisition.validate();
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  if (init_size < 1) throw Error(ErrorCode::InvalidArgument, "init_size must be >= 1");
  if (max_iterations < 0) {
    throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 0");
  }
  if (moo.pop_size < 4 || moo.pop_size % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "moo pop_size must be even and >= 4");
  }
  if (moo.generations < 0) {
    throw Error(ErrorCode::InvalidArgument, "moo generations must be >= 0");
  }
  if (!(initial_lengthscale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial lengthscale must be positive");
  }
  if (gp_restarts < 1 || acquisition_starts < 1) {
    throw Error(ErrorCode::InvalidArgument, "restart counts must be >= 1");
  }
  if (!noise.learned && !(noise.variance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise variance must be >= 0");
  }
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::AwaitingInit: return "awaiting_init";
    case Phase::Proposing: return "proposing";
    case Phase::AwaitingChoice: return "awaiting_choice";
    case Phase::AwaitingObservation: return "awaiting_observation";
    case Phase::Done: return "done";
  }
  return "done";
}

Phase phase_from_string(const std::string& text) {
  for (Phase p : {Phase::AwaitingInit, Phase::Proposing, Phase::AwaitingChoice,
                  Phase::AwaitingObservation, Phase::Done}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown phase '" + text + "'");
}

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Session::Session(SessionConfig config, ExpertSeedSet expert, DesignResult design)
    : config_(std::move(config)),
      expert_(std::move(expert)),
      design_(std::move(design)),
      clock_(system_clock()) {
  dataset_.inputs.resize(0, config_.domain.dim());
}

Session Session::restore(SessionConfig config, ExpertSeedSet expert,
                         DesignResult design, Phase phase, int iteration,
                         Dataset dataset, std::optional<AlternativeSet> pending,
                         std::optional<Eigen::VectorXd> awaiting,
                         std::vector<AuditRecord> audit) {
  Session s(std::move(config), std::move(expert), std::move(design));
  s.phase_ = phase;
  s.iteration_ = iteration;
  s.dataset_ = std::move(dataset);
  if (s.dataset_.inputs.cols() == 0) s.dataset_.inputs.resize(0, s.config_.domain.dim());
  s.pending_ = std::move(pending);
  s.awaiting_ = std::move(awaiting);
  s.audit_ = std::move(audit);
  return s;
}

void Session::require(Phase expected, const char* operation) const {
  if (phase_ != expected) {
    throw Error(ErrorCode::IllegalPhase, std::string(operation) + " requires phase " +
                                             to_string(expected) + ", session is " +
                                             to_string(phase_));
  }
}

void Session::commit_initial_observations(const std::vector<double>& outputs) {
  require(Phase::AwaitingInit, "initial observations");
  const auto expected = static_cast<std::size_t>(design_.points.rows());
  if (outputs.size() != expected) {
    throw Error(ErrorCode::LengthMismatch,
                "expected " + std::to_string(expected) + " initial observations, got " +
                    std::to_string(outputs.size()));
  }
  for (double y : outputs) {
    if (!std::isfinite(y)) {
      throw Error(ErrorCode::NonFiniteObservation, "initial observation is not finite");
    }
  }
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    dataset_.append(design_.points.row(static_cast<Eigen::Index>(i)).transpose(),
                    outputs[i]);
  }
  phase_ = config_.max_iterations == 0 ? Phase::Done : Phase::Proposing;
}

Surrogate Session::surrogate() const {
  if (dataset_.size() == 0) throw Error(ErrorCode::EmptyDataset, "no observations to fit");
  const auto it = static_cast<std::uint64_t>(iteration_);
  FitOptions fit_options;
  fit_options.restarts = config_.gp_restarts;
  fit_options.seed = derive_seed(config_.seed, Stream::GpFit, it);
  fit_options.initial_lengthscale = config_.initial_lengthscale;
  Surrogate out{fit(dataset_, config_.domain, config_.noise, fit_options), std::nullopt};
  if (config_.acquisition.kind == AcquisitionSpec::Kind::NoisyEI) {
    out.ensemble = build_fantasies(out.model, config_.acquisition,
                                   derive_seed(config_.seed, Stream::Fantasy, it));
  }
  return out;
}

const AlternativeSet& Session::step_propose() {
  require(Phase::Proposing, "propose");
  const auto it = static_cast<std::uint64_t>(iteration_);
  const Surrogate surrogate = this->surrogate();
  const GpModel& model = surrogate.model;
  const auto& ensemble = surrogate.ensemble;

  ProposeOptions options;
  options.moo = config_.moo;
  options.maximize.starts = config_.acquisition_starts;
  AlternativeSet set = propose(model, ensemble ? &*ensemble : nullptr,
                               config_.acquisition, config_.domain, config_.p, options,
                               derive_seed(config_.seed, {0x9E7, it}));
  set.iteration = iteration_ + 1;
  pending_ = std::move(set);
  phase_ = Phase::AwaitingChoice;
  return *pending_;
}

void Session::commit_choice(std::size_t index, const std::string& chooser) {
  require(Phase::AwaitingChoice, "choice");
  if (index >= pending_->size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "choice index " + std::to_string(index) + " outside [0, " +
                    std::to_string(pending_->size()) + ")");
  }
  AuditRecord record;
  record.iteration = pending_->iteration;
  record.chosen_index = index;
  record.chooser = chooser;
  record.chosen_at_ms = clock_();
  awaiting_ = pending_->candidates[index].point;
  record.alternatives = std::move(*pending_);
  pending_.reset();
  audit_.push_back(std::move(record));
  phase_ = Phase::AwaitingObservation;
}

void Session::commit_observation(double y) {
  require(Phase::AwaitingObservation, "observation");
  if (!std::isfinite(y)) {
    throw Error(ErrorCode::NonFiniteObservation, "observation is not finite");
  }
  dataset_.append(*awaiting_, y);
  awaiting_.reset();
  audit_.back().observation = y;
  audit_.back().observed_at_ms = clock_();
  ++iteration_;
  phase_ = iteration_ >= config_.max_iterations ? Phase::Done : Phase::Proposing;
}

Session init_session(const SessionConfig& config, const ExpertSeedSet& expert) {
  config.validate();
  DesignResult design;
  const std::uint64_t design_seed = derive_seed(config.seed, Stream::Design);
  if (expert.size() == 0) {
    design.points = latin_hypercube(config.init_size, config.domain, design_seed);
    design.expert_mask.assign(static_cast<std::size_t>(config.init_size), false);
    design.log_det = design_log_det(design.points, config.domain,
                                    default_design_kernel(config.domain.dim()));
  } else {
    design = augment_design(expert, config.init_size,
                            default_design_kernel(config.domain.dim()), config.domain,
                            design_seed);
  }
  return Session(config, expert, std::move(design));
}

Session replay(const Session& recorded) {
  Session session = init_session(recorded.config(), recorded.expert_seeds());
  if (recorded.phase() == Phase::AwaitingInit) return session;

  const Eigen::Index t = recorded.initial_design().points.rows();
  const Eigen::VectorXd& outputs = recorded.dataset().outputs;
  session.commit_initial_observations(
      std::vector<double>(outputs.data(), outputs.data() + t));
  for (const AuditRecord& record : recorded.audit_log()) {
    session.step_propose();
    session.commit_choice(record.chosen_index, record.chooser);
    if (record.observation) session.commit_observation(*record.observation);
  }
  if (recorded.pending() && session.phase() == Phase::Proposing) session.step_propose();
  return session;
}

AutonomousRun run_autonomous(const SessionConfig& config,
                             const NoisyObservation& observe,
                             const ChoicePolicy& policy, std::uint64_t seed) {
  const auto& objective = observe.objective();
  if (!objective.known_optimum) {
    throw Error(ErrorCode::InvalidArgument, "benchmark objective needs a known optimum");
  }
  Session session = init_session(config);
  AutonomousRun run{std::move(session), {}, {}, {}};
  Session& s = run.session;

  std::uint64_t eval_index = 0;
  std::vector<double> initial;
  for (Eigen::Index i = 0; i < s.initial_design().points.rows(); ++i) {
    const Eigen::VectorXd x = s.initial_design().points.row(i).transpose();
    const double y = observe(x, eval_index++);
    initial.push_back(y);
    run.observed_values.push_back(y);
    run.true_values.push_back(observe.truth(x));
  }
  s.commit_initial_observations(initial);

  while (s.phase() == Phase::Proposing) {
    const AlternativeSet& set = s.step_propose();
    std::optional<std::vector<double>> truths;
    if (policy.needs_truth()) {
      truths.emplace();
      for (const auto& c : set.candidates) truths->push_back(observe.truth(c.point));
    }
    const std::size_t choice =
        select(policy, set, truths,
               derive_seed(seed, Stream::Policy, static_cast<std::uint64_t>(s.iteration())));
    s.commit_choice(choice, policy.name());
    const Eigen::VectorXd x = *s.awaiting_point();
    const double y = observe(x, eval_index++);
    run.observed_values.push_back(y);
    run.true_values.push_back(observe.truth(x));
    s.commit_observation(y);
  }

  run.trace = RegretTrace::from_evaluations(
      run.true_values, static_cast<std::size_t>(s.initial_design().points.rows()),
      objective.known_optimum->value, objective.known_optimum->approximate);
  return run;
}

}  // namespace cbo
