#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "monofact/core_prob.hpp"

namespace monofact {

struct Multiplicity {
  FactoidId id;
  std::size_t count;
};

/// n training draws with their derived observed set O = {draws} + {bottom}
/// and unobserved set U = Y \ O.
class TrainingSample {
 public:
  TrainingSample(FactoidUniverse universe, std::vector<FactoidId> draws);

  const FactoidUniverse& universe() const { return universe_; }
  std::span<const FactoidId> draws() const { return draws_; }
  std::size_t n() const { return draws_.size(); }
  /// Exact per-factoid counts, sorted by id.
  std::span<const Multiplicity> counts() const { return counts_; }
  std::size_t count_of(FactoidId y) const;

  const FactoidSet& observed() const { return observed_; }
  FactoidSet unobserved() const { return observed_.complement(); }

 private:
  FactoidUniverse universe_;
  std::vector<FactoidId> draws_;
  std::vector<Multiplicity> counts_;
  FactoidSet observed_;
};

/// Fraction of the n draws whose non-bottom factoid occurs exactly once.
double monofact_estimate(const TrainingSample& s);

/// Classical Good-Turing estimate: singletons among all atoms, bottom included.
double good_turing_estimate(const TrainingSample& s);

/// p(U), the probability of factoids never observed.
double missing_mass(const FactoidDist& p, const TrainingSample& s);

/// Two-sided radius 3 sqrt(ln(4/delta)/n) for |missing mass - GT|; delta in (0,1].
double good_turing_radius(double delta, std::size_t n);

/// One-sided radius sqrt(6 ln(2/delta)/n); delta in (0,1/3].
double missing_mass_lower_radius(double delta, std::size_t n);

/// Unsimplified two-sided radius 1/n + 2.42 sqrt(ln(4/delta)/n).
double good_turing_radius_loose_constant(double delta, std::size_t n);

/// Unsimplified one-sided radius 1/n + 2.14 sqrt(ln(2/delta)/n).
double missing_mass_lower_radius_loose_constant(double delta, std::size_t n);

}  // namespace monofact
