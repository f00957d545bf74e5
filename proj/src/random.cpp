#include "cbo/random.hpp"

#include <cmath>
#include <vector>

#include <boost/random/sobol.hpp>

namespace cbo {

Eigen::VectorXd standard_normal_vector(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  NormalSampler normal;
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

Eigen::MatrixXd scrambled_sobol(Eigen::Index n, Eigen::Index dim,
                                std::uint64_t seed) {
  boost::random::sobol_engine<std::uint64_t, 64> engine(
      static_cast<std::size_t>(dim));
  Rng rng(seed);
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = rng();

  // The engine starts at the second point of the sequence; the origin is
  // restored so that every prefix of length 2^m is a digital net.
  Eigen::MatrixXd points(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const std::uint64_t base = i == 0 ? 0 : engine();
      const std::uint64_t raw = base ^ shift[static_cast<std::size_t>(j)];
      points(i, j) = static_cast<double>(raw >> 11) * 0x1.0p-53;
    }
  }
  return points;
}

}  // namespace cbo
