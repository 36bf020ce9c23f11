#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "monofact/bounds.hpp"

namespace monofact {

/// Per-type metrics of a multi-type trial, each type seen through its own
/// factoid map (range + bottom).
struct TypeRecord {
  double mf = 0.0;
  double missing_mass = 0.0;
  double halluc_rate = 0.0;
  double mc_adaptive = 0.0;
  BoundEvaluation cor_types;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double mf = 0.0;
  double gt = 0.0;
  double missing_mass = 0.0;
  double halluc_rate = 0.0;
  double mc_exact = 0.0;
  double mc_adaptive = 0.0;
  double tv_fixed = 0.0;  ///< TV(p^{B(g,eps)}, g)
  double mis_eps = 0.0;
  double kl = 0.0;
  std::size_t observed_count = 0;

  BoundEvaluation cor1;
  BoundEvaluation corbal;
  BoundEvaluation corbal_observed;  ///< diagnostic: |O| in place of n
  BoundEvaluation corg;
  BoundEvaluation corfw_tv;
  BoundEvaluation corfw_mis;

  /// max Pr[y in F] + |O| max E[p(y)] over U when known for the world model.
  std::optional<double> posterior_term;
  /// g(H) >= p(U) - TV(p^V_b(g), g) - 3/(2 delta) * posterior_term
  std::optional<bool> markov_event;
  /// p(U) >= mf - sqrt(6 ln(6/delta)/n)
  bool missing_mass_event = true;

  std::vector<TypeRecord> types;
};

struct MarkovStepReport {
  Frequency markov_event;        ///< threshold 1 - 2 delta / 3
  Frequency missing_mass_event;  ///< threshold 1 - delta / 3
  double markov_threshold = 0.0;
  double missing_mass_threshold = 0.0;
  bool passed = false;
};

/// Needs at least 100 trials. Trials without a known posterior term are
/// left out of the Markov-event frequency.
MarkovStepReport verify_markov_step(std::span<const TrialRecord> trials, double delta);

}  // namespace monofact
