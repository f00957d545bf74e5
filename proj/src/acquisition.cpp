#include "cbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cbo/box_minimizer.hpp"
#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {

void AcquisitionSpec::validate() const {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "UCB beta must be positive");
  }
  if (kind == Kind::NoisyEI) {
    if (n_fantasies < 1) {
      throw Error(ErrorCode::InvalidArgument, "n_fantasies must be >= 1");
    }
    if (base == Kind::NoisyEI) {
      throw Error(ErrorCode::InvalidArgument, "noisy base utility must be EI or UCB");
    }
  }
}

std::string to_string(AcquisitionSpec::Kind kind) {
  switch (kind) {
    case AcquisitionSpec::Kind::EI: return "ei";
    case AcquisitionSpec::Kind::UCB: return "ucb";
    case AcquisitionSpec::Kind::NoisyEI: return "noisy_ei";
  }
  return "ei";
}

AcquisitionSpec::Kind acquisition_kind_from_string(const std::string& name) {
  if (name == "ei") return AcquisitionSpec::Kind::EI;
  if (name == "ucb") return AcquisitionSpec::Kind::UCB;
  if (name == "noisy_ei") return AcquisitionSpec::Kind::NoisyEI;
  throw Error(ErrorCode::InvalidArgument, "unknown acquisition '" + name + "'");
}

double expected_improvement(const Prediction& pred, double incumbent) {
  const double delta = pred.mean - incumbent;
  const double sigma = pred.sd();
  if (!(sigma > 0.0)) return std::max(delta, 0.0);
  const double z = delta / sigma;
  const double cdf = 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(delta * cdf + sigma * pdf, 0.0);
}

double upper_confidence_bound(const Prediction& pred, double beta) {
  return pred.mean + beta * pred.sd();
}

double incumbent_for(const GpModel& model) {
  if (model.noise_variance() == 0.0) return model.data().outputs.maxCoeff();
  double best = -std::numeric_limits<double>::infinity();
  const auto& unit = model.unit_inputs();
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    best = std::max(best, model.predict_unit(unit.row(i).transpose()).mean);
  }
  return best;
}

FantasyEnsemble build_fantasies(const GpModel& model,
                                const AcquisitionSpec& spec,
                                std::uint64_t seed) {
  spec.validate();
  FantasyEnsemble ensemble;
  if (model.noise_variance() == 0.0) {
    ensemble.members.push_back(model);
    ensemble.incumbents.push_back(incumbent_for(model));
    return ensemble;
  }
  const int count = spec.kind == AcquisitionSpec::Kind::NoisyEI ? spec.n_fantasies
                                                                : std::max(spec.n_fantasies, 1);
  ensemble.members.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const Eigen::VectorXd synthetic = model.sample_at_unit(
        model.unit_inputs(), derive_seed(seed, {static_cast<std::uint64_t>(j)}));
    ensemble.members.push_back(model.with_outputs(synthetic, 0.0));
    ensemble.incumbents.push_back(synthetic.maxCoeff());
  }
  return ensemble;
}

Acquisition::Acquisition(const AcquisitionSpec& spec, const GpModel& model,
                         const FantasyEnsemble* ensemble)
    : spec_(spec), model_(model), ensemble_(ensemble) {
  spec_.validate();
  if (spec_.kind == AcquisitionSpec::Kind::NoisyEI) {
    if (ensemble_ == nullptr || ensemble_->members.empty()) {
      throw Error(ErrorCode::MissingEnsemble,
                  "noisy expected improvement needs a fantasy ensemble");
    }
  } else {
    incumbent_ = incumbent_for(model_);
  }
}

double Acquisition::base_utility(AcquisitionSpec::Kind kind,
                                 const Prediction& pred,
                                 double incumbent) const {
  if (kind == AcquisitionSpec::Kind::UCB) {
    return upper_confidence_bound(pred, spec_.beta);
  }
  return expected_improvement(pred, incumbent);
}

double Acquisition::at_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (spec_.kind != AcquisitionSpec::Kind::NoisyEI) {
    return base_utility(spec_.kind, model_.predict_unit(u), incumbent_);
  }
  double total = 0.0;
  const auto& members = ensemble_->members;
  for (std::size_t j = 0; j < members.size(); ++j) {
    total += base_utility(spec_.base, members[j].predict_unit(u),
                          ensemble_->incumbents[j]);
  }
  return total / static_cast<double>(members.size());
}

double Acquisition::operator()(const Eigen::VectorXd& x) const {
  return at_unit(model_.domain().to_unit(x));
}

double evaluate(const AcquisitionSpec& spec, const GpModel& model,
                const FantasyEnsemble* ensemble, const Eigen::VectorXd& x) {
  return Acquisition(spec, model, ensemble)(x);
}

AcquisitionOptimum maximize(const Acquisition& acquisition,
                            const BoxDomain& domain, std::uint64_t seed,
                            const MaximizeOptions& options) {
  const Eigen::Index d = domain.dim();
  const Eigen::MatrixXd starts =
      scrambled_sobol(std::max(options.starts, 1), d, seed);
  const Eigen::VectorXd lower = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd upper = Eigen::VectorXd::Ones(d);

  auto negated = [&acquisition](const Eigen::VectorXd& u) {
    return -acquisition.at_unit(u);
  };
  const GradientObjective objective =
      with_finite_differences(negated, lower, upper, options.fd_step);
  BoxMinimizerOptions opt;
  opt.function_tolerance = options.tolerance;
  opt.gradient_tolerance = options.tolerance;
  opt.max_iterations = options.max_iterations;

  AcquisitionOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < starts.rows(); ++i) {
    const BoxMinimizerResult r =
        minimize_in_box(objective, starts.row(i).transpose(), lower, upper, opt);
    const double value = -r.value;
    if (value > best.value || best.unit.size() == 0) {
      best.value = value;
      best.unit = r.x;
    }
  }
  best.x = domain.from_unit(best.unit);
  return best;
}

}  // namespace cbo
