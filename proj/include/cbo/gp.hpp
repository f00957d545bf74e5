#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace cbo {

/// Axis-aligned search box. All GP arithmetic happens on the unit cube; this
/// type owns the affine map to and from it.
class BoxDomain {
 public:
  BoxDomain() = default;
  BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper);

  static BoxDomain unit(Eigen::Index dim);

  Eigen::Index dim() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd width() const { return upper_ - lower_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }

  bool contains(const Eigen::VectorXd& x) const;

  Eigen::VectorXd to_unit(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const;
  /// Row-wise versions.
  Eigen::MatrixXd rows_to_unit(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd rows_from_unit(const Eigen::MatrixXd& u) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Observations, one input per row.
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd outputs;

  Eigen::Index size() const { return outputs.size(); }
  void append(const Eigen::VectorXd& x, double y);
};

struct KernelParams {
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;

  static KernelParams isotropic(Eigen::Index dim, double lengthscale,
                                double signal_variance = 1.0);
  void validate() const;
};

/// Matern-5/2 covariance with per-dimension lengthscales.
double matern52(const Eigen::Ref<const Eigen::VectorXd>& a,
                const Eigen::Ref<const Eigen::VectorXd>& b,
                const KernelParams& params);

/// Cross-covariance between the rows of `a` and the rows of `b`.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KernelParams& params);

/// Cholesky of `matrix` with diagonal jitter escalated from
/// 1e-10*scale by factors of ten up to 1e-4*scale. Returns the jitter that
/// succeeded, or nullopt when every level failed.
struct JitteredCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};
std::optional<JitteredCholesky> jittered_cholesky(const Eigen::MatrixXd& matrix,
                                                  double scale);

/// log|K| through Cholesky, or -infinity when K is numerically singular.
/// No jitter is added: a repeated row must read as degenerate.
double log_determinant(const Eigen::MatrixXd& matrix);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;

  double sd() const;
};

struct NoiseMode {
  bool learned = false;
  double variance = 0.0;

  static NoiseMode fixed(double variance) { return {false, variance}; }
  static NoiseMode learn() { return {true, 0.0}; }
};

struct FitOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  /// Isotropic starting lengthscale on the unit cube.
  double initial_lengthscale = 0.2;
};

/// A Gaussian process conditioned on data. Immutable once constructed.
class GpModel {
 public:
  /// Conditions on `data` with fixed hyperparameters. Throws SingularGram if
  /// the Gram matrix cannot be factored even with maximal jitter.
  GpModel(BoxDomain domain, Dataset data, KernelParams kernel,
          double mean_constant, double noise_variance);

  /// Posterior at a point given in domain units.
  Prediction predict(const Eigen::VectorXd& x) const;
  /// Posterior at a point on the unit cube.
  Prediction predict_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Joint posterior draw of the latent function at the rows of `points`
  /// (domain units).
  Eigen::VectorXd sample_at(const Eigen::MatrixXd& points,
                            std::uint64_t seed) const;
  Eigen::VectorXd sample_at_unit(const Eigen::MatrixXd& unit_points,
                                 std::uint64_t seed) const;

  /// Same inputs and hyperparameters, different outputs and noise level.
  GpModel with_outputs(const Eigen::VectorXd& outputs,
                       double noise_variance) const;

  const BoxDomain& domain() const { return domain_; }
  const Dataset& data() const { return data_; }
  const Eigen::MatrixXd& unit_inputs() const { return unit_inputs_; }
  const KernelParams& kernel() const { return kernel_; }
  double mean_constant() const { return mean_constant_; }
  double noise_variance() const { return noise_variance_; }
  double jitter() const { return jitter_; }
  Eigen::MatrixXd gram_factor() const;
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  void cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& u,
                        Eigen::VectorXd& k) const;

  BoxDomain domain_;
  Dataset data_;
  Eigen::MatrixXd unit_inputs_;
  Eigen::MatrixXd scaled_inputs_;  // unit inputs divided by lengthscales
  KernelParams kernel_;
  double mean_constant_ = 0.0;
  double noise_variance_ = 0.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

/// Log marginal likelihood of `data` under the given hyperparameters, with
/// inputs mapped to the unit cube.
double log_marginal_likelihood(const BoxDomain& domain, const Dataset& data,
                               const KernelParams& kernel, double mean_constant,
                               double noise_variance);

/// Hyperparameters by multi-start maximisation of the log marginal likelihood.
/// Outputs are standardised internally; the search box is lengthscales in
/// [1e-3, 10], signal variance in [1e-4, 1e3] and learned noise in [1e-8, 1]
/// in standardised units. The returned model is expressed in raw units.
GpModel fit(const Dataset& data, const BoxDomain& domain, NoiseMode noise,
            const FitOptions& options = {});

}  // namespace cbo
