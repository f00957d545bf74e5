#include "cbo/alternatives.hpp"

#include <cmath>
#include <limits>

#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {

std::size_t AlternativeSet::optimum_index() const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].is_utility_optimum) return i;
  }
  throw Error(ErrorCode::InvalidArgument, "alternative set has no utility optimum");
}

double batch_utility(const Eigen::MatrixXd& alternatives,
                     const Acquisition& acquisition) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < alternatives.rows(); ++i) {
    total += acquisition(alternatives.row(i).transpose());
  }
  return total;
}

double batch_utility(const Eigen::MatrixXd& alternatives,
                     const AcquisitionSpec& spec, const GpModel& model,
                     const FantasyEnsemble* ensemble) {
  return batch_utility(alternatives, Acquisition(spec, model, ensemble));
}

Variability batch_variability(const Eigen::MatrixXd& alternatives,
                              const Eigen::VectorXd& x_star,
                              const KernelParams& kernel) {
  Eigen::MatrixXd all(alternatives.rows() + 1, x_star.size());
  all.topRows(alternatives.rows()) = alternatives;
  all.row(alternatives.rows()) = x_star.transpose();
  Variability v;
  v.log_det = log_determinant(kernel_matrix(all, all, kernel));
  v.det = std::isfinite(v.log_det) ? std::exp(v.log_det) : 0.0;
  return v;
}

namespace {

Candidate make_candidate(const GpModel& model, const Acquisition& acquisition,
                         const BoxDomain& domain, const Eigen::VectorXd& unit,
                         bool optimum) {
  Candidate c;
  c.point = domain.from_unit(unit);
  c.utility = acquisition.at_unit(domain.to_unit(c.point));
  const Prediction pred = model.predict(c.point);
  c.predicted_mean = pred.mean;
  c.predicted_sd = pred.sd();
  c.is_utility_optimum = optimum;
  return c;
}

}  // namespace

AlternativeSet propose(const GpModel& model, const FantasyEnsemble* ensemble,
                       const AcquisitionSpec& spec, const BoxDomain& domain,
                       int p, const ProposeOptions& options,
                       std::uint64_t seed) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  const Acquisition acquisition(spec, model, ensemble);
  const AcquisitionOptimum best = maximize(
      acquisition, domain, derive_seed(seed, Stream::AcquisitionStarts),
      options.maximize);

  AlternativeSet set;
  if (p == 1) {
    set.candidates.push_back(make_candidate(model, acquisition, domain, best.unit, true));
    return set;
  }

  const Eigen::Index d = domain.dim();
  const Eigen::Index rows = p - 1;
  const KernelParams& kernel = model.kernel();
  Eigen::MatrixXd batch(rows + 1, d);
  batch.row(rows) = best.unit.transpose();

  MooProblem problem;
  problem.lower = Eigen::VectorXd::Zero(rows * d);
  problem.upper = Eigen::VectorXd::Ones(rows * d);
  problem.evaluate = [&](const Eigen::VectorXd& flat) {
    double utility = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      batch.row(r) = flat.segment(r * d, d).transpose();
      utility += acquisition.at_unit(flat.segment(r * d, d));
    }
    const double log_det = log_determinant(kernel_matrix(batch, batch, kernel));
    return ObjectivePair{utility, std::isfinite(log_det)
                                      ? std::max(log_det, kDegenerateLogVariability)
                                      : kDegenerateLogVariability};
  };
  problem.seeded.push_back(best.unit.replicate(rows, 1));

  const ParetoArchive archive =
      nsga2(problem, options.moo, derive_seed(seed, Stream::Moo));

  // The knee is taken over batches that are actually distinct from x*.
  ParetoArchive distinct;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < archive.entries.size(); ++i) {
    if (archive.entries[i].objectives[1] > kDegenerateLogVariability) {
      distinct.entries.push_back(archive.entries[i]);
      origin.push_back(i);
    }
  }
  std::size_t knee_in_archive = 0;
  if (distinct.entries.empty()) {
    knee_in_archive = knee_index(archive);
  } else {
    knee_in_archive = origin[knee_index(distinct)];
  }

  const Eigen::VectorXd& knee = archive.entries[knee_in_archive].decision;
  for (Eigen::Index r = 0; r < rows; ++r) {
    set.candidates.push_back(
        make_candidate(model, acquisition, domain, knee.segment(r * d, d), false));
  }
  set.candidates.push_back(make_candidate(model, acquisition, domain, best.unit, true));

  set.knee = static_cast<int>(knee_in_archive);
  set.pareto_snapshot.entries.reserve(archive.entries.size());
  for (const auto& e : archive.entries) {
    ParetoEntry entry{Eigen::VectorXd(rows * d), e.objectives};
    for (Eigen::Index r = 0; r < rows; ++r) {
      entry.decision.segment(r * d, d) = domain.from_unit(e.decision.segment(r * d, d));
    }
    set.pareto_snapshot.entries.push_back(std::move(entry));
  }
  return set;
}

}  // namespace cbo
