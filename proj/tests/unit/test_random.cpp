#include <gtest/gtest.h>

#include <set>

#include "cbo/random.hpp"

using namespace cbo;

TEST(Random, DeriveSeedIsPureAndKeySensitive) {
  EXPECT_EQ(derive_seed(5, {1, 2}), derive_seed(5, {1, 2}));
  EXPECT_NE(derive_seed(5, {1, 2}), derive_seed(5, {2, 1}));
  EXPECT_NE(derive_seed(5, Stream::Design), derive_seed(5, Stream::GpFit));
  EXPECT_NE(derive_seed(5, Stream::Noise, 0), derive_seed(5, Stream::Noise, 1));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, Stream::Policy, i));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Random, HashNameIsFnv1a) {
  EXPECT_EQ(hash_name(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hash_name("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Random, Uniform01StaysInHalfOpenInterval) {
  Rng rng(3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Random, NormalSamplerMoments) {
  const Eigen::VectorXd z = standard_normal_vector(200000, 11);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
  EXPECT_EQ(z, standard_normal_vector(200000, 11));
}

TEST(Random, ScrambledSobolIsStratified) {
  const Eigen::MatrixXd s = scrambled_sobol(256, 3, 9);
  ASSERT_EQ(s.rows(), 256);
  EXPECT_GE(s.minCoeff(), 0.0);
  EXPECT_LT(s.maxCoeff(), 1.0);
  // A digital shift keeps the (0,m,s)-net property: every 1/16 slab of each
  // coordinate holds exactly 16 of the first 256 points.
  for (Eigen::Index k = 0; k < 3; ++k) {
    std::vector<int> counts(16, 0);
    for (Eigen::Index i = 0; i < 256; ++i) ++counts[static_cast<int>(s(i, k) * 16)];
    for (int c : counts) EXPECT_EQ(c, 16);
  }
  EXPECT_EQ(s, scrambled_sobol(256, 3, 9));
  EXPECT_NE(s, scrambled_sobol(256, 3, 10));
}
