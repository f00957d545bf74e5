#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace cbo {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to turn (seed, counter...) tuples into
/// independent stream seeds so that results never depend on call order.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed);
  for (auto k : keys) h = mix64(h ^ mix64(k));
  return h;
}

/// FNV-1a, for turning names into stable seed material.
constexpr std::uint64_t hash_name(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Purpose tags for derive_seed, one per consumer of randomness.
enum class Stream : std::uint64_t {
  Design = 1,
  GpFit,
  Fantasy,
  AcquisitionStarts,
  Moo,
  Policy,
  Noise,
  Objective,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                 std::uint64_t counter = 0) {
  return derive_seed(seed, {static_cast<std::uint64_t>(stream), counter});
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal draws via Box-Muller on uniform01, so the sequence depends
/// only on the engine and not on the standard library's distribution code.
class NormalSampler {
 public:
  double operator()(Rng& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform01(rng); } while (u1 <= 0.0);
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Eigen::VectorXd standard_normal_vector(Eigen::Index n, std::uint64_t seed);

/// `n` points of a digitally shifted Sobol sequence in [0,1)^dim, one per row.
Eigen::MatrixXd scrambled_sobol(Eigen::Index n, Eigen::Index dim,
                                std::uint64_t seed);

}  // namespace cbo
