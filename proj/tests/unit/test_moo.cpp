#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cbo/error.hpp"
#include "cbo/moo.hpp"
#include "support.hpp"

using namespace cbo;
using cbo::testing::Gen;

namespace {

std::vector<std::size_t> brute_pareto(const std::vector<ObjectivePair>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      dominated = pts[j][0] >= pts[i][0] && pts[j][1] >= pts[i][1] &&
                  (pts[j][0] > pts[i][0] || pts[j][1] > pts[i][1]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<ObjectivePair> random_points(Gen& g, int n, bool coarse) {
  std::vector<ObjectivePair> pts;
  for (int i = 0; i < n; ++i) {
    if (coarse) {
      pts.push_back({double(g.integer(0, 5)), double(g.integer(0, 5))});
    } else {
      pts.push_back({g.uniform(), g.uniform()});
    }
  }
  return pts;
}

// Monte-Carlo-free hypervolume oracle: union area of the dominated boxes on a
// grid of all distinct coordinates.
double grid_hypervolume(const std::vector<ObjectivePair>& pts, const ObjectivePair& ref) {
  std::vector<double> xs{ref[0]}, ys{ref[1]};
  for (const auto& p : pts) {
    xs.push_back(std::max(p[0], ref[0]));
    ys.push_back(std::max(p[1], ref[1]));
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]), cy = 0.5 * (ys[j] + ys[j + 1]);
      for (const auto& p : pts) {
        if (p[0] >= cx && p[1] >= cy) {
          area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
          break;
        }
      }
    }
  }
  return area;
}

}  // namespace

TEST(Dominance, Basics) {
  EXPECT_TRUE(dominates({1, 1}, {0, 1}));
  EXPECT_FALSE(dominates({1, 1}, {1, 1}));
  EXPECT_FALSE(dominates({1, 0}, {0, 1}));
}

TEST(ParetoFilter, MatchesBruteForce) {
  Gen g(1);
  for (int t = 0; t < 200; ++t) {
    const auto pts = random_points(g, g.integer(1, 40), t % 2 == 0);
    EXPECT_EQ(pareto_filter(pts), brute_pareto(pts));
  }
}

TEST(NondominatedRanks, PeelingOracle) {
  Gen g(2);
  for (int t = 0; t < 100; ++t) {
    const auto pts = random_points(g, g.integer(1, 30), t % 2 == 0);
    const auto ranks = nondominated_ranks(pts);
    std::vector<std::size_t> remaining(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) remaining[i] = i;
    int front = 0;
    while (!remaining.empty()) {
      std::vector<ObjectivePair> sub;
      for (auto i : remaining) sub.push_back(pts[i]);
      const auto keep = brute_pareto(sub);
      std::vector<std::size_t> next;
      std::size_t k = 0;
      for (std::size_t j = 0; j < remaining.size(); ++j) {
        if (k < keep.size() && keep[k] == j) {
          EXPECT_EQ(ranks[remaining[j]], front);
          ++k;
        } else {
          next.push_back(remaining[j]);
        }
      }
      remaining = next;
      ++front;
    }
  }
}

TEST(Hypervolume, MatchesGridOracle) {
  Gen g(3);
  for (int t = 0; t < 100; ++t) {
    const auto pts = random_points(g, g.integer(1, 20), t % 3 == 0);
    const ObjectivePair ref{-0.1, -0.2};
    EXPECT_NEAR(hypervolume(pts, ref), grid_hypervolume(pts, ref), 1e-12);
  }
  EXPECT_DOUBLE_EQ(hypervolume({{1.0, 1.0}}, {0.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(hypervolume({{-1.0, 1.0}}, {0.0, 0.0}), 0.0);
}

TEST(Knee, MatchesBruteForceChordDistance) {
  Gen g(4);
  for (int t = 0; t < 100; ++t) {
    ParetoArchive a;
    const int n = g.integer(1, 25);
    for (int i = 0; i < n; ++i) {
      const double u = g.uniform();
      a.entries.push_back({Eigen::VectorXd::Constant(1, u),
                           {u, std::pow(1.0 - u, g.uniform(0.3, 3.0))}});
    }
    // Brute force: normalised perpendicular distance to the chord between
    // the best-f1 and best-f2 entries.
    double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
    for (const auto& e : a.entries) {
      lo0 = std::min(lo0, e.objectives[0]);
      hi0 = std::max(hi0, e.objectives[0]);
      lo1 = std::min(lo1, e.objectives[1]);
      hi1 = std::max(hi1, e.objectives[1]);
    }
    auto nx = [&](double v) { return hi0 > lo0 ? (v - lo0) / (hi0 - lo0) : 0.0; };
    auto ny = [&](double v) { return hi1 > lo1 ? (v - lo1) / (hi1 - lo1) : 0.0; };
    std::size_t a0 = 0, a1 = 0;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      if (a.entries[i].objectives[0] > a.entries[a0].objectives[0]) a0 = i;
      if (a.entries[i].objectives[1] > a.entries[a1].objectives[1]) a1 = i;
    }
    const double x0 = nx(a.entries[a0].objectives[0]), y0 = ny(a.entries[a0].objectives[1]);
    const double x1 = nx(a.entries[a1].objectives[0]), y1 = ny(a.entries[a1].objectives[1]);
    const double len = std::hypot(x1 - x0, y1 - y0);
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      const double px = nx(a.entries[i].objectives[0]), py = ny(a.entries[i].objectives[1]);
      const double dist =
          len > 0 ? std::abs((x1 - x0) * (y0 - py) - (x0 - px) * (y1 - y0)) / len : 0.0;
      if (dist > best_d ||
          (dist == best_d && px > nx(a.entries[best].objectives[0]))) {
        best = i;
        best_d = dist;
      }
    }
    EXPECT_EQ(knee_index(a), best) << "trial " << t;
  }
  EXPECT_THROW(knee_index(ParetoArchive{}), Error);
}

TEST(Nsga2, ToyFrontCoversTheSegment) {
  // Maximise (x, 1 - x): every feasible point is Pareto optimal.
  MooProblem problem;
  problem.lower = Eigen::VectorXd::Zero(1);
  problem.upper = Eigen::VectorXd::Ones(1);
  problem.evaluate = [](const Eigen::VectorXd& x) { return ObjectivePair{x[0], 1.0 - x[0]}; };
  const auto archive = nsga2(problem, {}, 3);
  std::vector<ObjectivePair> pts;
  for (const auto& e : archive.entries) pts.push_back(e.objectives);
  EXPECT_GE(archive.entries.size(), 40u);
  EXPECT_GE(hypervolume(pts, {0.0, 0.0}), 0.9 * 0.5);
}

TEST(Nsga2, SeededIndividualSurvivesWhenOptimal) {
  MooProblem problem;
  problem.lower = Eigen::VectorXd::Zero(2);
  problem.upper = Eigen::VectorXd::Ones(2);
  problem.evaluate = [](const Eigen::VectorXd& x) {
    return ObjectivePair{-x.squaredNorm(), -(x - Eigen::Vector2d(1, 1)).squaredNorm()};
  };
  problem.seeded = {Eigen::Vector2d(0, 0)};
  Nsga2Options o;
  o.generations = 0;
  const auto archive = nsga2(problem, o, 1);
  bool found = false;
  for (const auto& e : archive.entries) found = found || e.decision == Eigen::Vector2d(0, 0);
  EXPECT_TRUE(found);
}

TEST(Nsga2, DeterministicAndValidated) {
  MooProblem problem;
  problem.lower = Eigen::VectorXd::Zero(2);
  problem.upper = Eigen::VectorXd::Ones(2);
  problem.evaluate = [](const Eigen::VectorXd& x) { return ObjectivePair{x[0], x[1] - x[0] * x[0]}; };
  Nsga2Options o;
  o.generations = 20;
  const auto a = nsga2(problem, o, 5), b = nsga2(problem, o, 5);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].decision, b.entries[i].decision);
  o.pop_size = 7;
  EXPECT_THROW(nsga2(problem, o, 5), Error);
}
