#include <gtest/gtest.h>

#include <cmath>

#include "cbo/alternatives.hpp"
#include "support.hpp"

using namespace cbo;
using cbo::testing::Gen;

namespace {

GpModel model_2d() {
  const BoxDomain dom(Eigen::Vector2d(-2, 0), Eigen::Vector2d(2, 10));
  Dataset data;
  data.inputs.resize(0, 2);
  Gen g(5);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = dom.from_unit(g.matrix(2, 1).col(0));
    data.append(x, std::sin(x[0]) + std::cos(0.5 * x[1]));
  }
  return fit(data, dom, NoiseMode::fixed(0.0));
}

ProposeOptions quick() {
  ProposeOptions o;
  o.maximize.starts = 32;
  o.moo.generations = 30;
  return o;
}

}  // namespace

TEST(BatchVariability, TwoPointDeterminant) {
  const KernelParams k = KernelParams::isotropic(1, 0.5, 2.0);
  Eigen::MatrixXd alt(1, 1);
  alt(0, 0) = 0.2;
  const Eigen::VectorXd xs = Eigen::VectorXd::Constant(1, 0.7);
  const double c = matern52(alt.row(0).transpose(), xs, k);
  const auto v = batch_variability(alt, xs, k);
  EXPECT_NEAR(v.det, 4.0 - c * c, 1e-12);
  EXPECT_NEAR(v.log_det, std::log(4.0 - c * c), 1e-12);
}

TEST(BatchVariability, CopyOfOptimumIsDegenerate) {
  const KernelParams k = KernelParams::isotropic(2, 0.3);
  const Eigen::VectorXd xs = Eigen::Vector2d(0.4, 0.4);
  const auto v = batch_variability(xs.transpose(), xs, k);
  EXPECT_EQ(v.det, 0.0);
  EXPECT_EQ(v.log_det, -std::numeric_limits<double>::infinity());
}

TEST(BatchUtility, SumsIndividualUtilities) {
  const GpModel m = model_2d();
  const Acquisition acq(AcquisitionSpec::ei(), m);
  Eigen::MatrixXd alts(3, 2);
  alts << -1, 2, 0, 5, 1.5, 9;
  EXPECT_NEAR(batch_utility(alts, acq),
              acq(alts.row(0).transpose()) + acq(alts.row(1).transpose()) +
                  acq(alts.row(2).transpose()),
              1e-15);
}

TEST(Propose, SingleCandidateIsTheOptimum) {
  const GpModel m = model_2d();
  const auto set = propose(m, nullptr, AcquisitionSpec::ei(), m.domain(), 1, quick(), 3);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_TRUE(set.candidates[0].is_utility_optimum);
  EXPECT_EQ(set.knee, -1);
  EXPECT_TRUE(set.pareto_snapshot.entries.empty());
}

TEST(Propose, KneeSetStructure) {
  const GpModel m = model_2d();
  const Acquisition acq(AcquisitionSpec::ei(), m);
  for (int p : {2, 4}) {
    const auto set = propose(m, nullptr, AcquisitionSpec::ei(), m.domain(), p, quick(), 7);
    ASSERT_EQ(set.size(), static_cast<std::size_t>(p));
    int flagged = 0;
    for (const auto& c : set.candidates) {
      flagged += c.is_utility_optimum;
      EXPECT_TRUE(m.domain().contains(c.point));
      EXPECT_DOUBLE_EQ(c.utility, acq(c.point));
      EXPECT_DOUBLE_EQ(c.predicted_mean, m.predict(c.point).mean);
    }
    EXPECT_EQ(flagged, 1);
    EXPECT_EQ(set.optimum_index(), static_cast<std::size_t>(p - 1));

    // The snapshot is a nondominated set and the knee entry is the one offered.
    std::vector<ObjectivePair> objs;
    for (const auto& e : set.pareto_snapshot.entries) objs.push_back(e.objectives);
    EXPECT_EQ(pareto_filter(objs).size(), objs.size());
    ASSERT_GE(set.knee, 0);
    const auto& knee = set.pareto_snapshot.entries[static_cast<std::size_t>(set.knee)];
    double utility = 0.0;
    for (int r = 0; r < p - 1; ++r) {
      EXPECT_LT((knee.decision.segment(2 * r, 2) - set.candidates[static_cast<std::size_t>(r)].point)
                    .cwiseAbs()
                    .maxCoeff(),
                1e-9);
      utility += set.candidates[static_cast<std::size_t>(r)].utility;
    }
    EXPECT_NEAR(knee.objectives[0], utility, 1e-9);
    EXPECT_GT(knee.objectives[1], kDegenerateLogVariability);
  }
}

TEST(Propose, Deterministic) {
  const GpModel m = model_2d();
  const auto a = propose(m, nullptr, AcquisitionSpec::ucb(), m.domain(), 3, quick(), 9);
  const auto b = propose(m, nullptr, AcquisitionSpec::ucb(), m.domain(), 3, quick(), 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.candidates[i].point, b.candidates[i].point);
  EXPECT_EQ(a.knee, b.knee);
}
