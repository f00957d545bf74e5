#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbo/alternatives.hpp"

namespace cbo {

/// Simulated chooser used for autonomous benchmarking.
struct ChoicePolicy {
  enum class Kind { Expert, Adversarial, Trusting, PBest };

  Kind kind = Kind::Trusting;
  double probability = 1.0;  // PBest only

  static ChoicePolicy expert() { return {Kind::Expert}; }
  static ChoicePolicy adversarial() { return {Kind::Adversarial}; }
  static ChoicePolicy trusting() { return {Kind::Trusting}; }
  static ChoicePolicy pbest(double probability);

  /// Parses `expert`, `adversarial`, `trusting` or `pbest:<prob>`.
  static ChoicePolicy parse(const std::string& text);
  std::string name() const;
  bool needs_truth() const { return kind != Kind::Trusting; }
};

/// Index of the candidate the policy picks. `true_values[i]` is the noiseless
/// objective at candidate i; required by every policy except Trusting.
std::size_t select(const ChoicePolicy& policy, const AlternativeSet& set,
                   const std::optional<std::vector<double>>& true_values,
                   std::uint64_t seed);

}  // namespace cbo
