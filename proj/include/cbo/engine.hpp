#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbo/acquisition.hpp"
#include "cbo/alternatives.hpp"
#include "cbo/doe.hpp"
#include "cbo/gp.hpp"
#include "cbo/objectives.hpp"
#include "cbo/policies.hpp"

namespace cbo {

struct SessionConfig {
  BoxDomain domain;
  AcquisitionSpec acquisition;
  int p = 4;
  int init_size = 8;
  Nsga2Options moo;
  /// Starting isotropic lengthscale for hyperparameter search (unit cube).
  double initial_lengthscale = 0.2;
  int gp_restarts = 8;
  int acquisition_starts = 256;
  NoiseMode noise = NoiseMode::fixed(0.0);
  int max_iterations = 48;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Phase { AwaitingInit, Proposing, AwaitingChoice, AwaitingObservation, Done };

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& text);

struct AuditRecord {
  int iteration = 0;
  AlternativeSet alternatives;
  std::size_t chosen_index = 0;
  std::string chooser;
  std::optional<double> observation;
  std::int64_t chosen_at_ms = 0;
  std::int64_t observed_at_ms = 0;
};

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

/// Optimisation state for one problem. Every mutation goes through one of
/// the commit/propose operations, which enforce the phase order
///   AwaitingInit -> (Proposing -> AwaitingChoice -> AwaitingObservation)* -> Done
/// and raise IllegalPhase otherwise.
/// The fitted model (and fantasies, for noisy EI) behind one proposal.
struct Surrogate {
  GpModel model;
  std::optional<FantasyEnsemble> ensemble;
};

class Session {
 public:
  Session(SessionConfig config, ExpertSeedSet expert, DesignResult design);

  const SessionConfig& config() const { return config_; }
  const ExpertSeedSet& expert_seeds() const { return expert_; }
  const DesignResult& initial_design() const { return design_; }
  Phase phase() const { return phase_; }
  /// Completed optimisation iterations.
  int iteration() const { return iteration_; }
  const Dataset& dataset() const { return dataset_; }
  const std::optional<AlternativeSet>& pending() const { return pending_; }
  /// The chosen point while AwaitingObservation.
  const std::optional<Eigen::VectorXd>& awaiting_point() const { return awaiting_; }
  const std::vector<AuditRecord>& audit_log() const { return audit_; }

  /// Fits the model exactly as the next step_propose will.
  Surrogate surrogate() const;

  void set_clock(Clock clock) { clock_ = std::move(clock); }

  /// Observed outputs for the initial design, in design order.
  void commit_initial_observations(const std::vector<double>& outputs);
  /// Fits the GP to the current data and emits the next alternative set.
  const AlternativeSet& step_propose();
  void commit_choice(std::size_t index, const std::string& chooser);
  void commit_observation(double y);

  /// Restores a session from its persisted fields (used by deserialisation).
  static Session restore(SessionConfig config, ExpertSeedSet expert,
                         DesignResult design, Phase phase, int iteration,
                         Dataset dataset, std::optional<AlternativeSet> pending,
                         std::optional<Eigen::VectorXd> awaiting,
                         std::vector<AuditRecord> audit);

 private:
  void require(Phase expected, const char* operation) const;

  SessionConfig config_;
  ExpertSeedSet expert_;
  DesignResult design_;
  Phase phase_ = Phase::AwaitingInit;
  int iteration_ = 0;
  Dataset dataset_;
  std::optional<AlternativeSet> pending_;
  std::optional<Eigen::VectorXd> awaiting_;
  std::vector<AuditRecord> audit_;
  Clock clock_;
};

/// Builds the initial design: a centred LHS when no expert seeds are given,
/// the determinant-maximising completion otherwise.
Session init_session(const SessionConfig& config, const ExpertSeedSet& expert = {});

/// Re-runs a session from its config, initial observations and recorded
/// choices. The result should match the original exactly.
Session replay(const Session& recorded);

struct AutonomousRun {
  Session session;
  RegretTrace trace;
  /// Noiseless value of every evaluation, initial design first.
  std::vector<double> true_values;
  std::vector<double> observed_values;
};

/// Runs the loop to termination, letting `policy` choose each iteration.
/// `seed` drives the policy's random draws; everything else follows
/// config.seed and the observation function's own seed.
AutonomousRun run_autonomous(const SessionConfig& config,
                             const NoisyObservation& observe,
                             const ChoicePolicy& policy, std::uint64_t seed);

}  // namespace cbo
