#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbo/gp.hpp"

namespace cbo {

struct AcquisitionSpec {
  enum class Kind { EI, UCB, NoisyEI };

  Kind kind = Kind::EI;
  /// UCB exploration weight.
  double beta = 2.0;
  /// Utility averaged over the fantasy ensemble when kind == NoisyEI.
  Kind base = Kind::EI;
  int n_fantasies = 8;

  static AcquisitionSpec ei() { return {}; }
  static AcquisitionSpec ucb(double beta = 2.0) { return {Kind::UCB, beta}; }
  static AcquisitionSpec noisy(Kind base = Kind::EI, int n_fantasies = 8,
                               double beta = 2.0) {
    return {Kind::NoisyEI, beta, base, n_fantasies};
  }

  void validate() const;
};

std::string to_string(AcquisitionSpec::Kind kind);
AcquisitionSpec::Kind acquisition_kind_from_string(const std::string& name);

/// Noiseless GPs conditioned on joint posterior draws of the latent function
/// at the parent's training inputs, with the parent's hyperparameters.
struct FantasyEnsemble {
  std::vector<GpModel> members;
  /// Best synthetic output of each member.
  std::vector<double> incumbents;
};

/// Closed-form expected improvement over `incumbent`. Returns the analytic
/// limit max(mean - incumbent, 0) when the variance is zero.
double expected_improvement(const Prediction& pred, double incumbent);

double upper_confidence_bound(const Prediction& pred, double beta);

/// Best observed output for noiseless models; the largest posterior mean over
/// the training inputs otherwise.
double incumbent_for(const GpModel& model);

FantasyEnsemble build_fantasies(const GpModel& model,
                                const AcquisitionSpec& spec,
                                std::uint64_t seed);

/// A utility bound to a fitted model (and, for NoisyEI, its ensemble). Holds
/// references: the model and ensemble must outlive it.
class Acquisition {
 public:
  Acquisition(const AcquisitionSpec& spec, const GpModel& model,
              const FantasyEnsemble* ensemble = nullptr);

  /// Utility at a point on the unit cube.
  double at_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  /// Utility at a point in domain units.
  double operator()(const Eigen::VectorXd& x) const;

  const GpModel& model() const { return model_; }
  const AcquisitionSpec& spec() const { return spec_; }

 private:
  double base_utility(AcquisitionSpec::Kind kind, const Prediction& pred,
                      double incumbent) const;

  AcquisitionSpec spec_;
  const GpModel& model_;
  const FantasyEnsemble* ensemble_;
  double incumbent_ = 0.0;
};

double evaluate(const AcquisitionSpec& spec, const GpModel& model,
                const FantasyEnsemble* ensemble, const Eigen::VectorXd& x);

struct AcquisitionOptimum {
  Eigen::VectorXd x;     // domain units
  Eigen::VectorXd unit;  // same point on the unit cube
  double value = 0.0;
};

struct MaximizeOptions {
  int starts = 256;
  double tolerance = 1e-10;
  double fd_step = 1e-6;
  int max_iterations = 100;
};

/// Multi-start bounded quasi-Newton search from scrambled Sobol starts.
/// The best local optimum wins; ties go to the lowest start index.
AcquisitionOptimum maximize(const Acquisition& acquisition,
                            const BoxDomain& domain, std::uint64_t seed,
                            const MaximizeOptions& options = {});

}  // namespace cbo
