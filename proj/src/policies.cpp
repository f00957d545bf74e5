#include "cbo/policies.hpp"

#include <cmath>
#include <sstream>

#include "cbo/error.hpp"
#include "cbo/random.hpp"

namespace cbo {

ChoicePolicy ChoicePolicy::pbest(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "pbest probability must lie in [0, 1]");
  }
  return {Kind::PBest, probability};
}

ChoicePolicy ChoicePolicy::parse(const std::string& text) {
  if (text == "expert") return expert();
  if (text == "adversarial") return adversarial();
  if (text == "trusting") return trusting();
  constexpr std::string_view prefix = "pbest:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string number = text.substr(prefix.size());
    std::size_t used = 0;
    double prob = 0.0;
    try {
      prob = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != number.size() || number.empty()) {
      throw Error(ErrorCode::InvalidArgument, "bad pbest probability in '" + text + "'");
    }
    return pbest(prob);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown policy '" + text + "'");
}

std::string ChoicePolicy::name() const {
  switch (kind) {
    case Kind::Expert: return "expert";
    case Kind::Adversarial: return "adversarial";
    case Kind::Trusting: return "trusting";
    case Kind::PBest: {
      std::ostringstream out;
      out << "pbest:" << probability;
      return out.str();
    }
  }
  return "trusting";
}

namespace {

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t argmin(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace

std::size_t select(const ChoicePolicy& policy, const AlternativeSet& set,
                   const std::optional<std::vector<double>>& true_values,
                   std::uint64_t seed) {
  if (set.candidates.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot choose from an empty set");
  }
  if (policy.kind == ChoicePolicy::Kind::Trusting) return set.optimum_index();

  if (!true_values) {
    throw Error(ErrorCode::MissingTruth,
                "policy '" + policy.name() + "' needs true objective values");
  }
  if (true_values->size() != set.size()) {
    throw Error(ErrorCode::LengthMismatch, "one true value per candidate required");
  }
  switch (policy.kind) {
    case ChoicePolicy::Kind::Expert: return argmax(*true_values);
    case ChoicePolicy::Kind::Adversarial: return argmin(*true_values);
    case ChoicePolicy::Kind::PBest: {
      Rng rng(seed);
      if (uniform01(rng) < policy.probability) return argmax(*true_values);
      const auto n = static_cast<double>(set.size());
      return std::min(static_cast<std::size_t>(uniform01(rng) * n), set.size() - 1);
    }
    case ChoicePolicy::Kind::Trusting: break;
  }
  return set.optimum_index();
}

}  // namespace cbo
