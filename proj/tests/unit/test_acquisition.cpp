#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "cbo/acquisition.hpp"
#include "cbo/error.hpp"
#include "support.hpp"

using namespace cbo;
using cbo::testing::Gen;

namespace {

// Stratified Monte-Carlo estimate of E[max(Y - incumbent, 0)], Y ~ N(mean, sd^2).
double mc_improvement(double mean, double sd, double incumbent, int n, std::uint64_t seed) {
  const boost::math::normal_distribution<> normal;
  Rng rng(seed);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + std::max(uniform01(rng), 1e-12)) / n;
    sum += std::max(mean + sd * boost::math::quantile(normal, std::min(u, 1.0 - 1e-16)) - incumbent,
                    0.0);
  }
  return sum / n;
}

GpModel toy_model(double noise) {
  Dataset data;
  data.inputs.resize(0, 1);
  for (double x : {0.1, 0.35, 0.6, 0.9}) {
    data.append(Eigen::VectorXd::Constant(1, x), std::sin(7.0 * x));
  }
  return GpModel(BoxDomain::unit(1), data, KernelParams::isotropic(1, 0.2), 0.0, noise);
}

}  // namespace

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  Gen g(12);
  for (int t = 0; t < 5; ++t) {
    const double mean = g.uniform(-1, 1), sd = g.uniform(0.05, 1.0), inc = g.uniform(-1, 1);
    EXPECT_NEAR(expected_improvement({mean, sd * sd}, inc),
                mc_improvement(mean, sd, inc, 200000, static_cast<std::uint64_t>(t)), 1e-3);
  }
}

TEST(ExpectedImprovement, ZeroVarianceLimit) {
  EXPECT_DOUBLE_EQ(expected_improvement({1.5, 0.0}, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(expected_improvement({0.5, 0.0}, 1.0), 0.0);
  // At mean == incumbent, EI = sd * pdf(0).
  EXPECT_NEAR(expected_improvement({0.0, 4.0}, 0.0), 2.0 * 0.3989422804014327, 1e-15);
}

TEST(ExpectedImprovement, MonotoneInMeanAndSd) {
  double prev = -1.0;
  for (double m = -2.0; m <= 2.0; m += 0.25) {
    const double v = expected_improvement({m, 0.3}, 0.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = -1.0;
  for (double s = 0.1; s <= 2.0; s += 0.1) {
    const double v = expected_improvement({-0.5, s * s}, 0.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(UpperConfidenceBound, MeanPlusBetaSd) {
  EXPECT_DOUBLE_EQ(upper_confidence_bound({1.0, 0.25}, 2.0), 2.0);
}

TEST(Incumbent, NoiselessUsesBestObservation) {
  const GpModel m = toy_model(0.0);
  EXPECT_DOUBLE_EQ(incumbent_for(m), m.data().outputs.maxCoeff());
}

TEST(Incumbent, NoisyUsesBestPosteriorMean) {
  const GpModel m = toy_model(0.1);
  double best = -1e300;
  for (Eigen::Index i = 0; i < m.data().size(); ++i) {
    best = std::max(best, m.predict(m.data().inputs.row(i).transpose()).mean);
  }
  EXPECT_DOUBLE_EQ(incumbent_for(m), best);
  EXPECT_LT(best, m.data().outputs.maxCoeff());
}

TEST(NoisyEi, RequiresEnsemble) {
  const GpModel m = toy_model(0.01);
  EXPECT_THROW(Acquisition(AcquisitionSpec::noisy(), m, nullptr), Error);
}

TEST(NoisyEi, CollapsesToEiWithoutNoise) {
  const GpModel m = toy_model(0.0);
  const auto ens = build_fantasies(m, AcquisitionSpec::noisy(), 3);
  ASSERT_EQ(ens.members.size(), 1u);
  const Acquisition noisy(AcquisitionSpec::noisy(), m, &ens);
  const Acquisition plain(AcquisitionSpec::ei(), m);
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x);
    EXPECT_NEAR(noisy(v), plain(v), 1e-9);
  }
}

TEST(NoisyEi, EnsembleIsSeededAndSized) {
  const GpModel m = toy_model(0.05);
  const auto a = build_fantasies(m, AcquisitionSpec::noisy(AcquisitionSpec::Kind::EI, 6), 4);
  const auto b = build_fantasies(m, AcquisitionSpec::noisy(AcquisitionSpec::Kind::EI, 6), 4);
  ASSERT_EQ(a.members.size(), 6u);
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_EQ(a.members[j].data().outputs, b.members[j].data().outputs);
    EXPECT_EQ(a.members[j].noise_variance(), 0.0);
    EXPECT_DOUBLE_EQ(a.incumbents[j], a.members[j].data().outputs.maxCoeff());
  }
}

TEST(NoisyEi, SmallAtSampledLocations) {
  const GpModel m = toy_model(0.05);
  const auto ens = build_fantasies(m, AcquisitionSpec::noisy(), 5);
  const Acquisition acq(AcquisitionSpec::noisy(), m, &ens);
  double peak = 0.0;
  for (int i = 0; i <= 1000; ++i) peak = std::max(peak, acq(Eigen::VectorXd::Constant(1, i / 1000.0)));
  for (Eigen::Index i = 0; i < m.data().size(); ++i) {
    EXPECT_LE(acq(m.data().inputs.row(i).transpose()), 0.1 * peak);
  }
}

TEST(Maximize, BeatsDenseGridScan) {
  const GpModel m = toy_model(0.0);
  for (const auto& spec : {AcquisitionSpec::ei(), AcquisitionSpec::ucb()}) {
    const Acquisition acq(spec, m);
    double grid = -1e300;
    for (int i = 0; i <= 20000; ++i) grid = std::max(grid, acq(Eigen::VectorXd::Constant(1, i / 20000.0)));
    MaximizeOptions o;
    o.starts = 32;
    const auto opt = maximize(acq, BoxDomain::unit(1), 8, o);
    EXPECT_GE(opt.value, grid - 1e-9);
    EXPECT_DOUBLE_EQ(opt.value, acq(opt.x));
  }
}

TEST(Maximize, ReportsDomainAndUnitCoordinates) {
  Dataset data;
  data.inputs.resize(0, 2);
  data.append(Eigen::Vector2d(-3, 40), 1.0);
  data.append(Eigen::Vector2d(2, 10), 0.0);
  const BoxDomain dom(Eigen::Vector2d(-5, 0), Eigen::Vector2d(5, 50));
  const GpModel m(dom, data, KernelParams::isotropic(2, 0.3), 0.0, 0.0);
  const Acquisition acq(AcquisitionSpec::ei(), m);
  MaximizeOptions o;
  o.starts = 16;
  const auto opt = maximize(acq, dom, 1, o);
  EXPECT_TRUE(dom.contains(opt.x));
  EXPECT_LT((dom.from_unit(opt.unit) - opt.x).cwiseAbs().maxCoeff(), 1e-12);
  const auto again = maximize(acq, dom, 1, o);
  EXPECT_EQ(opt.x, again.x);
}

TEST(AcquisitionSpec, NamesRoundTrip) {
  for (auto k : {AcquisitionSpec::Kind::EI, AcquisitionSpec::Kind::UCB,
                 AcquisitionSpec::Kind::NoisyEI}) {
    EXPECT_EQ(acquisition_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(acquisition_kind_from_string("pi"), Error);
}
