#include <gtest/gtest.h>

#include <cmath>

#include "cbo/error.hpp"
#include "cbo/policies.hpp"
#include "cbo/random.hpp"

using namespace cbo;

namespace {

AlternativeSet set_of(std::size_t p, std::size_t optimum) {
  AlternativeSet s;
  for (std::size_t i = 0; i < p; ++i) {
    Candidate c;
    c.point = Eigen::VectorXd::Constant(1, double(i));
    c.is_utility_optimum = i == optimum;
    s.candidates.push_back(c);
  }
  return s;
}

}  // namespace

TEST(Policies, DeterministicChoosers) {
  const auto s = set_of(4, 3);
  const std::vector<double> truth{0.5, 2.0, -1.0, 1.0};
  EXPECT_EQ(select(ChoicePolicy::expert(), s, truth, 0), 1u);
  EXPECT_EQ(select(ChoicePolicy::adversarial(), s, truth, 0), 2u);
  EXPECT_EQ(select(ChoicePolicy::trusting(), s, std::nullopt, 0), 3u);
  EXPECT_EQ(select(ChoicePolicy::pbest(1.0), s, truth, 0), 1u);
}

TEST(Policies, TiesGoToLowestIndex) {
  const auto s = set_of(3, 2);
  EXPECT_EQ(select(ChoicePolicy::expert(), s, std::vector<double>{1, 1, 0}, 0), 0u);
  EXPECT_EQ(select(ChoicePolicy::adversarial(), s, std::vector<double>{1, 0, 0}, 0), 1u);
}

TEST(Policies, Errors) {
  const auto s = set_of(3, 2);
  EXPECT_THROW(select(ChoicePolicy::expert(), s, std::nullopt, 0), Error);
  EXPECT_THROW(select(ChoicePolicy::expert(), s, std::vector<double>{1, 2}, 0), Error);
  EXPECT_THROW(ChoicePolicy::pbest(1.5), Error);
  EXPECT_THROW(ChoicePolicy::parse("sometimes"), Error);
}

TEST(Policies, ParseAndName) {
  for (const char* name : {"expert", "adversarial", "trusting", "pbest:0.25"}) {
    EXPECT_EQ(ChoicePolicy::parse(name).name(), name);
  }
  EXPECT_DOUBLE_EQ(ChoicePolicy::parse("pbest:0.25").probability, 0.25);
}

TEST(Policies, PBestZeroIsUniform) {
  // Chi-square goodness of fit against uniform over p = 5; 4 dof, the 0.999
  // quantile is 18.47.
  const auto s = set_of(5, 4);
  const std::vector<double> truth{1, 2, 3, 4, 5};
  std::vector<int> counts(5, 0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    ++counts[select(ChoicePolicy::pbest(0.0), s, truth, derive_seed(77, Stream::Policy, i))];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 5.0) * (c - n / 5.0) / (n / 5.0);
  EXPECT_LT(chi2, 18.47);
}

TEST(Policies, PBestHitRate) {
  const auto s = set_of(4, 0);
  const std::vector<double> truth{0, 0, 9, 0};
  int hits = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    hits += select(ChoicePolicy::pbest(0.6), s, truth, derive_seed(3, Stream::Policy, i)) == 2;
  }
  // P(best) = 0.6 + 0.4 / 4.
  EXPECT_NEAR(hits / double(n), 0.7, 4.0 * std::sqrt(0.7 * 0.3 / n));
}
