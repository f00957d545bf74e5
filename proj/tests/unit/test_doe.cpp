#include <gtest/gtest.h>

#include <algorithm>

#include "cbo/doe.hpp"
#include "cbo/error.hpp"
#include "support.hpp"

using namespace cbo;
using cbo::testing::Gen;

TEST(LatinHypercube, OnePointPerStratumInEveryColumn) {
  Gen g(1);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = g.integer(1, 40), d = g.integer(1, 5);
    const BoxDomain dom = g.domain(d);
    for (bool jitter : {false, true}) {
      const Eigen::MatrixXd X = latin_hypercube(n, dom, static_cast<std::uint64_t>(t), jitter);
      const Eigen::MatrixXd U = dom.rows_to_unit(X);
      for (Eigen::Index k = 0; k < d; ++k) {
        std::vector<int> hits(static_cast<std::size_t>(n), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto s = std::min<Eigen::Index>(static_cast<Eigen::Index>(U(i, k) * n), n - 1);
          ++hits[static_cast<std::size_t>(s)];
        }
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
      }
    }
  }
}

TEST(LatinHypercube, SinglePointIsTheCentre) {
  const BoxDomain dom(Eigen::Vector2d(-1, 2), Eigen::Vector2d(3, 4));
  const Eigen::MatrixXd X = latin_hypercube(1, dom, 5);
  EXPECT_DOUBLE_EQ(X(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(X(0, 1), 3.0);
}

TEST(LatinHypercube, SeededDeterminism) {
  const BoxDomain dom = BoxDomain::unit(3);
  EXPECT_EQ(latin_hypercube(8, dom, 2), latin_hypercube(8, dom, 2));
  EXPECT_NE(latin_hypercube(8, dom, 2), latin_hypercube(8, dom, 3));
}

TEST(AugmentDesign, FullExpertSetIsKeptVerbatim) {
  Gen g(2);
  const BoxDomain dom = g.domain(2);
  ExpertSeedSet expert{dom.rows_from_unit(g.matrix(4, 2)), {}};
  const auto r = augment_design(expert, 4, default_design_kernel(2), dom, 1);
  EXPECT_EQ(r.points, expert.points);
  EXPECT_EQ(r.expert_mask, std::vector<bool>(4, true));
}

TEST(AugmentDesign, ExpertRowsAreFixedAndFirst) {
  Gen g(3);
  for (int t = 0; t < 10; ++t) {
    const BoxDomain dom = g.domain(2);
    const Eigen::Index m = g.integer(1, 4);
    ExpertSeedSet expert{dom.rows_from_unit(g.matrix(m, 2)), {}};
    const auto r = augment_design(expert, 8, default_design_kernel(2), dom,
                                  static_cast<std::uint64_t>(t));
    ASSERT_EQ(r.points.rows(), 8);
    for (Eigen::Index i = 0; i < m; ++i) {
      EXPECT_TRUE((r.points.row(i).array() == expert.points.row(i).array()).all());
      EXPECT_TRUE(r.expert_mask[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index i = m; i < 8; ++i) {
      EXPECT_FALSE(r.expert_mask[static_cast<std::size_t>(i)]);
      EXPECT_TRUE(dom.contains(r.points.row(i).transpose()));
    }
    EXPECT_DOUBLE_EQ(r.log_det, design_log_det(r.points, dom, default_design_kernel(2)));
  }
}

TEST(AugmentDesign, BeatsRandomCompletions) {
  const BoxDomain dom = BoxDomain::unit(2);
  const KernelParams kernel = default_design_kernel(2);
  Gen g(4);
  ExpertSeedSet expert{g.matrix(3, 2), {}};
  const auto r = augment_design(expert, 8, kernel, dom, 11);
  int beaten = 0;
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd pts(8, 2);
    pts.topRows(3) = expert.points;
    pts.bottomRows(5) = g.matrix(5, 2);
    if (r.log_det >= design_log_det(pts, dom, kernel)) ++beaten;
  }
  EXPECT_EQ(beaten, 100);
}

TEST(DesignLogDet, RepeatedPointIsDegenerate) {
  Eigen::MatrixXd pts(3, 1);
  pts << 0.2, 0.5, 0.2;
  EXPECT_EQ(design_log_det(pts, BoxDomain::unit(1), default_design_kernel(1)),
            -std::numeric_limits<double>::infinity());
}

TEST(AugmentDesign, RejectsBadExpertPoints) {
  const BoxDomain dom = BoxDomain::unit(2);
  ExpertSeedSet outside{Eigen::MatrixXd::Constant(1, 2, 1.5), {}};
  EXPECT_THROW(augment_design(outside, 4, default_design_kernel(2), dom, 0), Error);
  ExpertSeedSet wrong_dim{Eigen::MatrixXd::Constant(1, 3, 0.5), {}};
  EXPECT_THROW(augment_design(wrong_dim, 4, default_design_kernel(2), dom, 0), Error);
}
