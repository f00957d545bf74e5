#include "cbo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "cbo/box_minimizer.hpp"
#include "cbo/doe.hpp"
#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {

double rastrigin(const Eigen::VectorXd& x) {
  double total = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    total += x[i] * x[i] - 10.0 * std::cos(2.0 * std::numbers::pi * x[i]);
  }
  return total;
}

double rosenbrock(const Eigen::VectorXd& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    total += 100.0 * a * a + b * b;
  }
  return total;
}

double ackley(const Eigen::VectorXd& x) {
  constexpr double a = 20.0;
  constexpr double b = 0.2;
  constexpr double c = 2.0 * std::numbers::pi;
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cs = (c * x.array()).cos().sum() / d;
  return -a * std::exp(-b * std::sqrt(sq)) - std::exp(cs) + a + std::numbers::e;
}

double schwefel(const Eigen::VectorXd& x) {
  double total = 418.9829 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    total -= x[i] * std::sin(std::sqrt(std::abs(x[i])));
  }
  return total;
}

namespace {

double scan_range(const std::function<double(const Eigen::VectorXd&)>& f,
                  const BoxDomain& domain, std::uint64_t seed,
                  std::initializer_list<double> extra) {
  const Eigen::Index n = 10000 * domain.dim();
  const Eigen::MatrixXd points = latin_hypercube(n, domain, seed, true);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = f(points.row(i).transpose());
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : extra) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

}  // namespace

Objective analytic_objective(const std::string& name, int dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  const auto d = static_cast<Eigen::Index>(dim);
  double (*f)(const Eigen::VectorXd&) = nullptr;
  double half_width = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double optimum_coordinate = 0.0;
  if (name == "rastrigin") {
    f = rastrigin;
    half_width = 5.12;
  } else if (name == "rosenbrock") {
    f = rosenbrock;
    lower = -5.0;
    upper = 10.0;
    optimum_coordinate = 1.0;
  } else if (name == "ackley") {
    f = ackley;
    half_width = 32.768;
  } else if (name == "schwefel") {
    f = schwefel;
    half_width = 500.0;
    optimum_coordinate = 420.9687;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown test function '" + name + "'");
  }
  if (half_width > 0.0) {
    lower = -half_width;
    upper = half_width;
  }

  Objective obj;
  obj.name = name;
  obj.domain = BoxDomain(Eigen::VectorXd::Constant(d, lower),
                         Eigen::VectorXd::Constant(d, upper));
  obj.evaluate = [f](const Eigen::VectorXd& x) { return -f(x); };
  KnownOptimum opt;
  opt.point = Eigen::VectorXd::Constant(d, optimum_coordinate);
  opt.value = obj.evaluate(opt.point);
  obj.known_optimum = opt;
  obj.range_estimate =
      scan_range(obj.evaluate, obj.domain,
                 derive_seed(0x5CA7, {hash_name(name),
                                      static_cast<std::uint64_t>(dim)}),
                 {opt.value});
  return obj;
}

Objective sample_gp_objective(int dim, double lengthscale, std::uint64_t seed) {
  if (dim < 1 || dim > 5) {
    throw Error(ErrorCode::InvalidArgument, "sampled objectives support 1..5 dimensions");
  }
  if (!(lengthscale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lengthscale must be positive");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  const BoxDomain unit = BoxDomain::unit(d);
  const KernelParams kernel = KernelParams::isotropic(d, lengthscale, 1.0);
  const Eigen::MatrixXd anchors =
      latin_hypercube(300 * d, unit, derive_seed(seed, Stream::Objective, 0));

  auto chol = jittered_cholesky(kernel_matrix(anchors, anchors, kernel), 1.0);
  if (!chol) {
    throw Error(ErrorCode::SingularGram, "prior covariance at the anchors is singular");
  }
  const Eigen::VectorXd values =
      chol->llt.matrixL() *
      standard_normal_vector(anchors.rows(), derive_seed(seed, Stream::Objective, 1));
  auto interpolant = std::make_shared<const GpModel>(
      unit, Dataset{anchors, values}, kernel, 0.0, 0.0);

  Objective obj;
  obj.name = "gp_sample";
  obj.domain = unit;
  obj.evaluate = [interpolant](const Eigen::VectorXd& x) {
    return interpolant->predict_unit(x).mean;
  };
  obj.range_estimate = values.maxCoeff() - values.minCoeff();
  obj.anchors = Dataset{anchors, values};

  // Locate the maximum of the interpolant numerically.
  const Eigen::MatrixXd starts =
      scrambled_sobol(1024, d, derive_seed(seed, Stream::Objective, 2));
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(d);
  const GradientObjective negated = with_finite_differences(
      [interpolant](const Eigen::VectorXd& x) { return -interpolant->predict_unit(x).mean; },
      lo, hi, 1e-7);
  KnownOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  best.approximate = true;
  Eigen::Index argmax_anchor = 0;
  values.maxCoeff(&argmax_anchor);
  best.point = anchors.row(argmax_anchor).transpose();
  best.value = obj.evaluate(best.point);
  BoxMinimizerOptions opt;
  opt.max_iterations = 100;
  for (Eigen::Index i = 0; i < starts.rows(); ++i) {
    const auto r = minimize_in_box(negated, starts.row(i).transpose(), lo, hi, opt);
    if (-r.value > best.value) {
      best.value = -r.value;
      best.point = r.x;
    }
  }
  obj.known_optimum = best;
  return obj;
}

NoisyObservation::NoisyObservation(Objective objective, NoisySpec spec,
                                   std::uint64_t seed)
    : objective_(std::move(objective)), seed_(seed) {
  if (!(spec.noise_pct >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise percentage must be >= 0");
  }
  sd_ = spec.sd(objective_);
}

double NoisyObservation::operator()(const Eigen::VectorXd& x,
                                    std::uint64_t eval_index) const {
  const double truth = objective_.evaluate(x);
  if (sd_ == 0.0) return truth;
  Rng rng(derive_seed(seed_, Stream::Noise, eval_index));
  NormalSampler normal;
  return truth + sd_ * normal(rng);
}

NoisyObservation make_noisy(const Objective& objective, const NoisySpec& spec,
                            std::uint64_t seed) {
  return NoisyObservation(objective, spec, seed);
}

RegretTrace RegretTrace::from_evaluations(const std::vector<double>& true_values,
                                          std::size_t init_size, double optimum,
                                          bool approximate) {
  if (init_size < 1 || true_values.size() < init_size) {
    throw Error(ErrorCode::InvalidArgument,
                "trace needs at least the initial design evaluations");
  }
  RegretTrace trace;
  trace.approximate_optimum = approximate;
  double best = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t i = 0; i < true_values.size(); ++i) {
    best = std::max(best, true_values[i]);
    sum += true_values[i];
    if (i + 1 >= init_size) {
      trace.best_so_far.push_back(best);
      trace.simple_regret.push_back(optimum - best);
      trace.average_reward.push_back(sum / static_cast<double>(i + 1));
    }
  }
  return trace;
}

namespace {

Curve pointwise(const std::vector<const std::vector<double>*>& series) {
  const std::size_t length = series.front()->size();
  Curve c;
  c.mean.assign(length, 0.0);
  c.sd.assign(length, 0.0);
  const auto n = static_cast<double>(series.size());
  for (std::size_t t = 0; t < length; ++t) {
    double sum = 0.0;
    for (const auto* s : series) sum += (*s)[t];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto* s : series) ss += ((*s)[t] - mean) * ((*s)[t] - mean);
    c.mean[t] = mean;
    c.sd[t] = std::sqrt(ss / n);
  }
  return c;
}

}  // namespace

RegretSummary regret_aggregate(const std::vector<RegretTrace>& traces) {
  if (traces.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no traces to aggregate");
  }
  const std::size_t length = traces.front().simple_regret.size();
  std::vector<const std::vector<double>*> regret, reward;
  for (const auto& t : traces) {
    if (t.simple_regret.size() != length || t.average_reward.size() != length) {
      throw Error(ErrorCode::LengthMismatch, "traces differ in length");
    }
    regret.push_back(&t.simple_regret);
    reward.push_back(&t.average_reward);
  }
  RegretSummary summary;
  summary.simple_regret = pointwise(regret);
  summary.average_reward = pointwise(reward);
  summary.runs = traces.size();
  return summary;
}

}  // namespace cbo
