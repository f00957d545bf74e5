#include "cbo/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Individual {
  Eigen::VectorXd x;
  ObjectivePair f{};
  int rank = 0;
  double crowding = 0.0;
};

ObjectivePair sanitize(ObjectivePair f) {
  for (auto& v : f) {
    if (std::isnan(v)) v = -kInf;
  }
  return f;
}

std::vector<std::vector<std::size_t>> sort_fronts(
    const std::vector<ObjectivePair>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated[i].push_back(j);
        ++count[j];
      } else if (dominates(points[j], points[i])) {
        dominated[j].push_back(i);
        ++count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] == 0) fronts[0].push_back(i);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts.back()) {
      for (std::size_t j : dominated[i]) {
        if (--count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void assign_crowding(std::vector<Individual>& pop,
                     const std::vector<std::size_t>& front) {
  for (std::size_t i : front) pop[i].crowding = 0.0;
  if (front.size() <= 2) {
    for (std::size_t i : front) pop[i].crowding = kInf;
    return;
  }
  std::vector<std::size_t> order = front;
  for (int m = 0; m < 2; ++m) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[a].f[m] < pop[b].f[m];
    });
    pop[order.front()].crowding = kInf;
    pop[order.back()].crowding = kInf;
    const double range = pop[order.back()].f[m] - pop[order.front()].f[m];
    if (!(range > 0.0) || !std::isfinite(range)) continue;
    for (std::size_t k = 1; k + 1 < order.size(); ++k) {
      pop[order[k]].crowding +=
          (pop[order[k + 1]].f[m] - pop[order[k - 1]].f[m]) / range;
    }
  }
}

void rank_and_crowd(std::vector<Individual>& pop) {
  std::vector<ObjectivePair> f(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) f[i] = pop[i].f;
  const auto fronts = sort_fronts(f);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) pop[i].rank = static_cast<int>(r);
    assign_crowding(pop, fronts[r]);
  }
}

bool crowded_better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

std::size_t tournament(const std::vector<Individual>& pop, Rng& rng) {
  const auto n = static_cast<double>(pop.size());
  const auto a = std::min(static_cast<std::size_t>(uniform01(rng) * n), pop.size() - 1);
  const auto b = std::min(static_cast<std::size_t>(uniform01(rng) * n), pop.size() - 1);
  if (crowded_better(pop[b], pop[a])) return b;
  return a;
}

void simulated_binary_crossover(Eigen::VectorXd& c1, Eigen::VectorXd& c2,
                                const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper, double eta,
                                Rng& rng) {
  const double exponent = 1.0 / (eta + 1.0);
  for (Eigen::Index i = 0; i < c1.size(); ++i) {
    if (uniform01(rng) > 0.5) continue;
    if (std::abs(c1[i] - c2[i]) <= 1e-14) continue;
    const double y1 = std::min(c1[i], c2[i]);
    const double y2 = std::max(c1[i], c2[i]);
    const double yl = lower[i];
    const double yu = upper[i];
    const double u = uniform01(rng);

    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      if (u <= 1.0 / alpha) return std::pow(u * alpha, exponent);
      return std::pow(1.0 / (2.0 - u * alpha), exponent);
    };
    const double bq1 = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
    const double bq2 = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
    double v1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), yl, yu);
    double v2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), yl, yu);
    if (uniform01(rng) <= 0.5) std::swap(v1, v2);
    c1[i] = v1;
    c2[i] = v2;
  }
}

void polynomial_mutation(Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, double eta, double rate,
                         Rng& rng) {
  const double exponent = 1.0 / (eta + 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (uniform01(rng) > rate) continue;
    const double yl = lower[i];
    const double yu = upper[i];
    const double width = yu - yl;
    const double y = x[i];
    const double r = uniform01(rng);
    double deltaq = 0.0;
    if (r < 0.5) {
      const double xy = 1.0 - (y - yl) / width;
      const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(xy, eta + 1.0);
      deltaq = std::pow(val, exponent) - 1.0;
    } else {
      const double xy = 1.0 - (yu - y) / width;
      const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(xy, eta + 1.0);
      deltaq = 1.0 - std::pow(val, exponent);
    }
    x[i] = std::clamp(y + deltaq * width, yl, yu);
  }
}

}  // namespace

bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
  return a[0] >= b[0] && a[1] >= b[1] && (a[0] > b[0] || a[1] > b[1]);
}

std::vector<std::size_t> pareto_filter(const std::vector<ObjectivePair>& points) {
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "pareto_filter needs at least one point");
  }
  // Sweep by descending first objective; a point survives when its second
  // objective beats everything strictly ahead of it in the first.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][0] != points[b][0]) return points[a][0] > points[b][0];
    return points[a][1] > points[b][1];
  });
  std::vector<std::size_t> keep;
  double best_second = -kInf;
  std::size_t i = 0;
  while (i < order.size()) {
    // Group of equal first objective; only its max second objective can survive.
    std::size_t j = i;
    const double first = points[order[i]][0];
    const double group_best = points[order[i]][1];
    while (j < order.size() && points[order[j]][0] == first) {
      const double second = points[order[j]][1];
      if (second == group_best && second > best_second) keep.push_back(order[j]);
      ++j;
    }
    best_second = std::max(best_second, group_best);
    i = j;
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

std::vector<int> nondominated_ranks(const std::vector<ObjectivePair>& points) {
  std::vector<int> ranks(points.size(), 0);
  const auto fronts = sort_fronts(points);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) ranks[i] = static_cast<int>(r);
  }
  return ranks;
}

ParetoArchive nsga2(const MooProblem& problem, const Nsga2Options& options,
                    std::uint64_t seed) {
  const Eigen::Index dim = problem.dim();
  if (dim < 1 || problem.upper.size() != dim) {
    throw Error(ErrorCode::InvalidArgument, "MOO problem needs a nonempty box");
  }
  if (options.pop_size < 4 || options.pop_size % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "population size must be even and >= 4");
  }
  const auto pop_size = static_cast<std::size_t>(options.pop_size);
  const double mutation_rate =
      options.mutation_rate > 0.0 ? options.mutation_rate : 1.0 / static_cast<double>(dim);

  // Initial population: seeded individuals, then a jittered LHS on the box.
  std::vector<Individual> pop(pop_size);
  {
    Rng rng(derive_seed(seed, {0xA11CE}));
    std::vector<std::size_t> perm(pop_size);
    for (Eigen::Index j = 0; j < dim; ++j) {
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = perm.size(); i > 1; --i) {
        const auto k = std::min(
            static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i)), i - 1);
        std::swap(perm[i - 1], perm[k]);
      }
      for (std::size_t i = 0; i < pop_size; ++i) {
        if (j == 0) pop[i].x.resize(dim);
        const double u = (static_cast<double>(perm[i]) + uniform01(rng)) /
                         static_cast<double>(pop_size);
        pop[i].x[j] = problem.lower[j] + u * (problem.upper[j] - problem.lower[j]);
      }
    }
    for (std::size_t i = 0; i < problem.seeded.size() && i < pop_size; ++i) {
      pop[i].x = problem.seeded[i].cwiseMax(problem.lower).cwiseMin(problem.upper);
    }
  }
  for (auto& ind : pop) ind.f = sanitize(problem.evaluate(ind.x));
  rank_and_crowd(pop);

  for (int gen = 0; gen < options.generations; ++gen) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(gen) + 1}));
    std::vector<Individual> offspring;
    offspring.reserve(pop_size);
    while (offspring.size() < pop_size) {
      const std::size_t a = tournament(pop, rng);
      const std::size_t b = tournament(pop, rng);
      Individual c1{pop[a].x}, c2{pop[b].x};
      if (uniform01(rng) <= options.crossover_rate) {
        simulated_binary_crossover(c1.x, c2.x, problem.lower, problem.upper,
                                   options.crossover_eta, rng);
      }
      polynomial_mutation(c1.x, problem.lower, problem.upper, options.mutation_eta,
                          mutation_rate, rng);
      polynomial_mutation(c2.x, problem.lower, problem.upper, options.mutation_eta,
                          mutation_rate, rng);
      offspring.push_back(std::move(c1));
      offspring.push_back(std::move(c2));
    }
    for (auto& ind : offspring) ind.f = sanitize(problem.evaluate(ind.x));

    std::vector<Individual> merged = std::move(pop);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                  std::make_move_iterator(offspring.end()));
    std::vector<ObjectivePair> f(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) f[i] = merged[i].f;
    const auto fronts = sort_fronts(f);

    std::vector<Individual> next;
    next.reserve(pop_size);
    for (std::size_t r = 0; r < fronts.size() && next.size() < pop_size; ++r) {
      for (std::size_t i : fronts[r]) merged[i].rank = static_cast<int>(r);
      assign_crowding(merged, fronts[r]);
      if (next.size() + fronts[r].size() <= pop_size) {
        for (std::size_t i : fronts[r]) next.push_back(merged[i]);
      } else {
        std::vector<std::size_t> last = fronts[r];
        std::stable_sort(last.begin(), last.end(), [&](std::size_t x, std::size_t y) {
          return merged[x].crowding > merged[y].crowding;
        });
        for (std::size_t k = 0; next.size() < pop_size; ++k) next.push_back(merged[last[k]]);
      }
    }
    pop = std::move(next);
    rank_and_crowd(pop);
  }

  std::vector<ObjectivePair> f(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) f[i] = pop[i].f;
  ParetoArchive archive;
  for (std::size_t i : pareto_filter(f)) {
    const bool duplicate = std::any_of(
        archive.entries.begin(), archive.entries.end(),
        [&](const ParetoEntry& e) { return e.decision == pop[i].x; });
    if (!duplicate) archive.entries.push_back({pop[i].x, pop[i].f});
  }
  return archive;
}

std::size_t knee_index(const ParetoArchive& archive) {
  const auto& entries = archive.entries;
  if (entries.empty()) {
    throw Error(ErrorCode::InvalidArgument, "knee of an empty archive");
  }
  if (entries.size() == 1) return 0;

  std::array<double, 2> lo{kInf, kInf}, hi{-kInf, -kInf};
  for (const auto& e : entries) {
    for (int m = 0; m < 2; ++m) {
      lo[m] = std::min(lo[m], e.objectives[m]);
      hi[m] = std::max(hi[m], e.objectives[m]);
    }
  }
  std::vector<std::array<double, 2>> z(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (int m = 0; m < 2; ++m) {
      const double range = hi[m] - lo[m];
      z[i][m] = range > 0.0 ? (entries[i].objectives[m] - lo[m]) / range : 0.0;
    }
  }

  // Chord endpoints: best first objective and best second objective.
  auto extreme = [&](int m) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < z.size(); ++i) {
      const int o = 1 - m;
      if (z[i][m] > z[best][m] || (z[i][m] == z[best][m] && z[i][o] > z[best][o])) {
        best = i;
      }
    }
    return best;
  };
  const auto a = z[extreme(0)];
  const auto b = z[extreme(1)];
  const double cx = b[0] - a[0];
  const double cy = b[1] - a[1];
  const double chord = std::hypot(cx, cy);

  std::size_t knee = 0;
  double best_distance = -1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double distance =
        chord > 0.0 ? std::abs(cx * (z[i][1] - a[1]) - cy * (z[i][0] - a[0])) / chord
                    : 0.0;
    if (distance > best_distance ||
        (distance == best_distance && z[i][0] > z[knee][0])) {
      knee = i;
      best_distance = distance;
    }
  }
  return knee;
}

const ParetoEntry& knee_point(const ParetoArchive& archive) {
  return archive.entries[knee_index(archive)];
}

double hypervolume(const std::vector<ObjectivePair>& points,
                   const ObjectivePair& reference) {
  std::vector<ObjectivePair> inside;
  for (const auto& p : points) {
    if (p[0] > reference[0] && p[1] > reference[1]) inside.push_back(p);
  }
  if (inside.empty()) return 0.0;
  std::vector<ObjectivePair> front;
  for (std::size_t i : pareto_filter(inside)) front.push_back(inside[i]);
  std::sort(front.begin(), front.end(),
            [](const ObjectivePair& a, const ObjectivePair& b) { return a[0] > b[0]; });
  double volume = 0.0;
  double floor = reference[1];
  for (const auto& p : front) {
    if (p[1] > floor) {
      volume += (p[0] - reference[0]) * (p[1] - floor);
      floor = p[1];
    }
  }
  return volume;
}

}  // namespace cbo
