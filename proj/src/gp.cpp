#include "cbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cbo/box_minimizer.hpp"
#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;

inline double matern52_of_r2(double r2, double signal_variance) {
  const double r = std::sqrt(r2);
  return signal_variance * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) *
         std::exp(-kSqrt5 * r);
}

constexpr double kMinLengthscale = 1e-3;
constexpr double kMaxLengthscale = 10.0;
constexpr double kMinSignal = 1e-4;
constexpr double kMaxSignal = 1e3;
constexpr double kMinNoise = 1e-8;
constexpr double kMaxNoise = 1.0;

}  // namespace

BoxDomain::BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1 || lower_.size() != upper_.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "domain bounds must be nonempty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(upper_[i] > lower_[i]) || !std::isfinite(lower_[i]) ||
        !std::isfinite(upper_[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "domain upper bound must exceed lower bound in dimension " +
                      std::to_string(i));
    }
  }
}

BoxDomain BoxDomain::unit(Eigen::Index dim) {
  return BoxDomain(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

bool BoxDomain::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) return false;
  return (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

Eigen::VectorXd BoxDomain::to_unit(const Eigen::VectorXd& x) const {
  return ((x - lower_).array() / (upper_ - lower_).array()).matrix();
}

Eigen::VectorXd BoxDomain::from_unit(const Eigen::VectorXd& u) const {
  Eigen::VectorXd x =
      lower_ + (u.array() * (upper_ - lower_).array()).matrix();
  // Keep exact bounds when u sits on a face.
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Eigen::MatrixXd BoxDomain::rows_to_unit(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd u(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    u.row(i) = to_unit(x.row(i).transpose()).transpose();
  }
  return u;
}

Eigen::MatrixXd BoxDomain::rows_from_unit(const Eigen::MatrixXd& u) const {
  Eigen::MatrixXd x(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    x.row(i) = from_unit(u.row(i).transpose()).transpose();
  }
  return x;
}

void Dataset::append(const Eigen::VectorXd& x, double y) {
  const Eigen::Index n = size();
  if (n == 0 && inputs.cols() == 0) inputs.resize(0, x.size());
  inputs.conservativeResize(n + 1, x.size());
  inputs.row(n) = x.transpose();
  outputs.conservativeResize(n + 1);
  outputs[n] = y;
}

KernelParams KernelParams::isotropic(Eigen::Index dim, double lengthscale,
                                     double signal_variance) {
  return {Eigen::VectorXd::Constant(dim, lengthscale), signal_variance};
}

void KernelParams::validate() const {
  if (lengthscales.size() < 1 || !(lengthscales.array() > 0.0).all()) {
    throw Error(ErrorCode::InvalidArgument, "lengthscales must be positive");
  }
  if (!(signal_variance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "signal variance must be positive");
  }
}

double matern52(const Eigen::Ref<const Eigen::VectorXd>& a,
                const Eigen::Ref<const Eigen::VectorXd>& b,
                const KernelParams& params) {
  const double r2 =
      ((a - b).array() / params.lengthscales.array()).square().sum();
  return matern52_of_r2(r2, params.signal_variance);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KernelParams& params) {
  const Eigen::RowVectorXd inv_l = params.lengthscales.cwiseInverse().transpose();
  const Eigen::MatrixXd sa = a.array().rowwise() * inv_l.array();
  const Eigen::MatrixXd sb = b.array().rowwise() * inv_l.array();
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      k(i, j) = matern52_of_r2((sa.row(i) - sb.row(j)).squaredNorm(),
                               params.signal_variance);
    }
  }
  return k;
}

std::optional<JitteredCholesky> jittered_cholesky(const Eigen::MatrixXd& matrix,
                                                  double scale) {
  const Eigen::Index n = matrix.rows();
  for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * scale;
    Eigen::MatrixXd m = matrix;
    m.diagonal().array() += jitter;
    JitteredCholesky out{Eigen::LLT<Eigen::MatrixXd>(m), jitter};
    if (out.llt.info() == Eigen::Success && n >= 0) return out;
  }
  return std::nullopt;
}

double log_determinant(const Eigen::MatrixXd& matrix) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
  const double floor = 1e-13 * matrix.diagonal().cwiseAbs().maxCoeff();
  if ((diag.array().square() <= floor).any()) return kNegInf;
  return 2.0 * diag.array().log().sum();
}

double Prediction::sd() const { return std::sqrt(std::max(variance, 0.0)); }

GpModel::GpModel(BoxDomain domain, Dataset data, KernelParams kernel,
                 double mean_constant, double noise_variance)
    : domain_(std::move(domain)),
      data_(std::move(data)),
      kernel_(std::move(kernel)),
      mean_constant_(mean_constant),
      noise_variance_(noise_variance) {
  if (data_.size() == 0) {
    throw Error(ErrorCode::EmptyDataset, "cannot condition on an empty dataset");
  }
  if (data_.inputs.rows() != data_.size() ||
      data_.inputs.cols() != domain_.dim()) {
    throw Error(ErrorCode::InvalidArgument, "dataset shape does not match domain");
  }
  if (!(noise_variance_ >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise variance must be nonnegative");
  }
  kernel_.validate();
  if (kernel_.lengthscales.size() != domain_.dim()) {
    throw Error(ErrorCode::InvalidArgument, "lengthscale count must equal dimension");
  }

  unit_inputs_ = domain_.rows_to_unit(data_.inputs);
  scaled_inputs_ = unit_inputs_.array().rowwise() /
                   kernel_.lengthscales.transpose().array();

  Eigen::MatrixXd gram = kernel_matrix(unit_inputs_, unit_inputs_, kernel_);
  gram.diagonal().array() += noise_variance_;
  auto chol = jittered_cholesky(gram, kernel_.signal_variance);
  if (!chol) {
    throw Error(ErrorCode::SingularGram,
                "Gram matrix is not positive definite after jitter escalation");
  }
  llt_ = std::move(chol->llt);
  jitter_ = chol->jitter;
  alpha_ = llt_.solve(
      (data_.outputs.array() - mean_constant_).matrix());
}

void GpModel::cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& u,
                               Eigen::VectorXd& k) const {
  const Eigen::Index n = scaled_inputs_.rows();
  const Eigen::Index d = scaled_inputs_.cols();
  k.resize(n);
  double su[32];
  Eigen::VectorXd su_heap;
  double* scaled = su;
  if (d > 32) {
    su_heap.resize(d);
    scaled = su_heap.data();
  }
  for (Eigen::Index j = 0; j < d; ++j) scaled[j] = u[j] / kernel_.lengthscales[j];
  for (Eigen::Index i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double diff = scaled_inputs_(i, j) - scaled[j];
      r2 += diff * diff;
    }
    k[i] = matern52_of_r2(r2, kernel_.signal_variance);
  }
}

Prediction GpModel::predict(const Eigen::VectorXd& x) const {
  return predict_unit(domain_.to_unit(x));
}

Prediction GpModel::predict_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  Eigen::VectorXd k;
  cross_covariance(u, k);
  Prediction p;
  p.mean = mean_constant_ + k.dot(alpha_);
  llt_.matrixL().solveInPlace(k);
  p.variance = std::max(kernel_.signal_variance - k.squaredNorm(), 0.0);
  return p;
}

Eigen::VectorXd GpModel::sample_at(const Eigen::MatrixXd& points,
                                   std::uint64_t seed) const {
  return sample_at_unit(domain_.rows_to_unit(points), seed);
}

Eigen::VectorXd GpModel::sample_at_unit(const Eigen::MatrixXd& unit_points,
                                        std::uint64_t seed) const {
  if (unit_points.rows() < 1) {
    throw Error(ErrorCode::InvalidArgument, "need at least one sample location");
  }
  const Eigen::MatrixXd cross = kernel_matrix(unit_inputs_, unit_points, kernel_);
  const Eigen::MatrixXd v = llt_.matrixL().solve(cross);
  Eigen::MatrixXd cov = kernel_matrix(unit_points, unit_points, kernel_);
  cov.noalias() -= v.transpose() * v;
  cov = 0.5 * (cov + cov.transpose());
  const Eigen::VectorXd mean =
      (cross.transpose() * alpha_).array() + mean_constant_;

  auto chol = jittered_cholesky(cov, kernel_.signal_variance);
  if (!chol) {
    throw Error(ErrorCode::SingularGram,
                "posterior covariance is not positive semidefinite");
  }
  const Eigen::VectorXd z = standard_normal_vector(unit_points.rows(), seed);
  return mean + chol->llt.matrixL() * z;
}

GpModel GpModel::with_outputs(const Eigen::VectorXd& outputs,
                              double noise_variance) const {
  Dataset data{data_.inputs, outputs};
  return GpModel(domain_, std::move(data), kernel_, mean_constant_,
                 noise_variance);
}

Eigen::MatrixXd GpModel::gram_factor() const {
  return llt_.matrixL();
}

double log_marginal_likelihood(const BoxDomain& domain, const Dataset& data,
                               const KernelParams& kernel, double mean_constant,
                               double noise_variance) {
  const Eigen::MatrixXd unit = domain.rows_to_unit(data.inputs);
  Eigen::MatrixXd gram = kernel_matrix(unit, unit, kernel);
  gram.diagonal().array() += noise_variance;
  auto chol = jittered_cholesky(gram, kernel.signal_variance);
  if (!chol) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd centered = data.outputs.array() - mean_constant;
  const Eigen::VectorXd alpha = chol->llt.solve(centered);
  const double n = static_cast<double>(data.size());
  return -0.5 * centered.dot(alpha) -
         chol->llt.matrixLLT().diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

namespace {

// Negative log marginal likelihood and its gradient in log-parameter space.
// Parameter layout: [log lengthscales (d), log signal variance, log noise?].
class NegativeLogLikelihood {
 public:
  NegativeLogLikelihood(const Eigen::MatrixXd& unit_inputs,
                        const Eigen::VectorXd& outputs, bool learn_noise,
                        double fixed_noise)
      : x_(unit_inputs),
        y_(outputs),
        learn_noise_(learn_noise),
        fixed_noise_(fixed_noise) {}

  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const Eigen::Index n = x_.rows();
    const Eigen::Index d = x_.cols();
    const Eigen::VectorXd lengthscales = theta.head(d).array().exp();
    const double signal = std::exp(theta[d]);
    const double noise = learn_noise_ ? std::exp(theta[d + 1]) : fixed_noise_;

    const Eigen::MatrixXd scaled =
        x_.array().rowwise() / lengthscales.transpose().array();
    Eigen::MatrixXd gram(n, n);
    Eigen::MatrixXd shape(n, n);  // (5/3)(1+sqrt5 r) exp(-sqrt5 r) * signal
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) {
        const double r2 = (scaled.row(i) - scaled.row(j)).squaredNorm();
        const double r = std::sqrt(r2);
        const double e = std::exp(-kSqrt5 * r);
        gram(i, j) = gram(j, i) = signal * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * e;
        shape(i, j) = shape(j, i) = signal * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * e;
      }
    }
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += noise;
    auto chol = jittered_cholesky(k, signal);
    grad = Eigen::VectorXd::Zero(theta.size());
    if (!chol) return std::numeric_limits<double>::infinity();

    const Eigen::VectorXd alpha = chol->llt.solve(y_);
    const double value = 0.5 * y_.dot(alpha) +
                         chol->llt.matrixLLT().diagonal().array().log().sum() +
                         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    // dNLL/dtheta = -0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    Eigen::MatrixXd w = chol->llt.solve(Eigen::MatrixXd::Identity(n, n));
    w.noalias() -= alpha * alpha.transpose();
    w *= 0.5;

    for (Eigen::Index dim = 0; dim < d; ++dim) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const double diff = scaled(i, dim) - scaled(j, dim);
          acc += w(i, j) * shape(i, j) * diff * diff;
        }
      }
      grad[dim] = acc;
    }
    grad[d] = (w.array() * gram.array()).sum();
    if (learn_noise_) grad[d + 1] = w.trace() * noise;
    return value;
  }

 private:
  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  bool learn_noise_;
  double fixed_noise_;
};

}  // namespace

GpModel fit(const Dataset& data, const BoxDomain& domain, NoiseMode noise,
            const FitOptions& options) {
  if (data.size() == 0) {
    throw Error(ErrorCode::EmptyDataset, "cannot fit a GP to an empty dataset");
  }
  if (!noise.learned && !(noise.variance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fixed noise variance must be >= 0");
  }
  const Eigen::Index d = domain.dim();
  const double mean = data.outputs.mean();
  double scale = std::sqrt((data.outputs.array() - mean).square().mean());
  if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) scale = 1.0;
  const Eigen::VectorXd standardized = (data.outputs.array() - mean) / scale;
  const Eigen::MatrixXd unit = domain.rows_to_unit(data.inputs);

  const double fixed_noise = noise.learned ? 0.0 : noise.variance / (scale * scale);
  NegativeLogLikelihood nll(unit, standardized, noise.learned, fixed_noise);

  const Eigen::Index n_params = d + 1 + (noise.learned ? 1 : 0);
  Eigen::VectorXd lower(n_params), upper(n_params);
  lower.head(d).setConstant(std::log(kMinLengthscale));
  upper.head(d).setConstant(std::log(kMaxLengthscale));
  lower[d] = std::log(kMinSignal);
  upper[d] = std::log(kMaxSignal);
  if (noise.learned) {
    lower[d + 1] = std::log(kMinNoise);
    upper[d + 1] = std::log(kMaxNoise);
  }

  Rng rng(derive_seed(options.seed, Stream::GpFit));
  Eigen::VectorXd best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  BoxMinimizerOptions opt;
  opt.max_iterations = 100;
  opt.function_tolerance = 1e-10;
  opt.gradient_tolerance = 1e-6;

  for (int restart = 0; restart < std::max(options.restarts, 1); ++restart) {
    Eigen::VectorXd start(n_params);
    if (restart == 0) {
      start.head(d).setConstant(std::log(options.initial_lengthscale));
      start[d] = 0.0;
      if (noise.learned) start[d + 1] = std::log(1e-2);
    } else {
      for (Eigen::Index i = 0; i < d; ++i) {
        start[i] = std::log(1e-2) + uniform01(rng) * (std::log(2.0) - std::log(1e-2));
      }
      start[d] = std::log(0.1) + uniform01(rng) * (std::log(10.0) - std::log(0.1));
      if (noise.learned) {
        start[d + 1] = std::log(1e-6) + uniform01(rng) * (std::log(1e-1) - std::log(1e-6));
      }
    }
    start = start.cwiseMax(lower).cwiseMin(upper);
    const BoxMinimizerResult r = minimize_in_box(nll, start, lower, upper, opt);
    if (std::isfinite(r.value) && r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
    }
  }
  if (best_theta.size() == 0) {
    throw Error(ErrorCode::SingularGram,
                "no hyperparameter setting yields a factorizable Gram matrix");
  }

  KernelParams kernel;
  kernel.lengthscales = best_theta.head(d).array().exp();
  kernel.signal_variance = std::exp(best_theta[d]) * scale * scale;
  const double noise_raw = noise.learned
                               ? std::exp(best_theta[d + 1]) * scale * scale
                               : noise.variance;
  return GpModel(domain, data, std::move(kernel), mean, noise_raw);
}

}  // namespace cbo
