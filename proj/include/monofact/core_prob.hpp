#pragma once

// Finite discrete distributions over the factoid universe Y = {0, 1, ..., |Y|-1}.
//
// Index 0 is the empty fact (bottom). Universes in the experiments reach 10^7
// factoids while the interesting mass sits on a few thousand of them, so both
// sets and distributions are stored compactly:
//   * FactoidSet lists its members, or lists the members of its complement.
//   * FactoidDist lists explicit atoms; every unlisted factoid carries the same
//     background probability. A plain sparse distribution has background 0.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "monofact/rng.hpp"

namespace monofact {

using FactoidId = std::uint32_t;
inline constexpr FactoidId kBottom = 0;

class FactoidUniverse {
 public:
  explicit FactoidUniverse(std::size_t size);

  std::size_t size() const { return size_; }
  static constexpr FactoidId bottom_id() { return kBottom; }
  bool contains(FactoidId y) const { return y < size_; }

  friend bool operator==(const FactoidUniverse&, const FactoidUniverse&) = default;

 private:
  std::size_t size_;
};

class FactoidSet {
 public:
  /// Members given explicitly (sorted and deduplicated here).
  static FactoidSet of(FactoidUniverse universe, std::vector<FactoidId> ids);
  /// Every factoid except the given ones.
  static FactoidSet all_except(FactoidUniverse universe, std::vector<FactoidId> ids);
  static FactoidSet empty(FactoidUniverse universe) { return of(universe, {}); }
  static FactoidSet all(FactoidUniverse universe) { return all_except(universe, {}); }

  FactoidSet complement() const;
  bool contains(FactoidId y) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// True when listed() holds the excluded ids rather than the members.
  bool is_complement() const { return complement_; }
  std::span<const FactoidId> listed() const { return ids_; }
  const FactoidUniverse& universe() const { return universe_; }

  /// Materialized member list; O(|Y|) for complement-form sets.
  std::vector<FactoidId> members() const;

 private:
  FactoidSet(FactoidUniverse universe, std::vector<FactoidId> ids, bool complement)
      : universe_(universe), ids_(std::move(ids)), complement_(complement) {}

  FactoidUniverse universe_;
  std::vector<FactoidId> ids_;
  bool complement_;
};

struct Atom {
  FactoidId id;
  double prob;
};

class FactoidDist {
 public:
  /// Normalizes non-negative weights. `background_weight` applies to every
  /// factoid absent from `weights`. Throws DomainError on negative, duplicate
  /// or out-of-range entries and on zero total weight.
  static FactoidDist from_weights(FactoidUniverse universe, std::span<const Atom> weights,
                                  double background_weight = 0.0);
  static FactoidDist from_dense(FactoidUniverse universe, std::span<const double> weights);
  static FactoidDist uniform(FactoidUniverse universe);
  static FactoidDist uniform_over(FactoidUniverse universe, std::span<const FactoidId> ids);
  static FactoidDist point_mass(FactoidUniverse universe, FactoidId y);

  double prob(FactoidId y) const;
  double operator()(FactoidId y) const { return prob(y); }

  const FactoidUniverse& universe() const { return universe_; }
  /// Explicit atoms sorted by id.
  std::span<const Atom> atoms() const { return atoms_; }
  /// Probability of each factoid not listed in atoms().
  double background() const { return background_; }
  std::size_t background_count() const { return universe_.size() - atoms_.size(); }

  /// {y : prob(y) > 0}
  FactoidSet support() const;
  std::vector<double> dense() const;

 private:
  FactoidDist(FactoidUniverse universe, std::vector<Atom> atoms, double background)
      : universe_(universe), atoms_(std::move(atoms)), background_(background) {}

  FactoidUniverse universe_;
  std::vector<Atom> atoms_;
  double background_;
};

FactoidDist dist_from_weights(FactoidUniverse universe, const std::map<FactoidId, double>& weights);

/// D(S) = sum of D(y) over y in S.
double mass_of_set(const FactoidDist& d, const FactoidSet& s);

/// The three equivalent forms of total variation distance.
struct TvForms {
  double max_over_subsets;  ///< d1(A) - d2(A) for A = {y : d1(y) > d2(y)}
  double half_l1;           ///< (1/2) sum |d1(y) - d2(y)|
  double positive_part;     ///< sum (d1(y) - d2(y))_+
};
TvForms tv_forms(const FactoidDist& d1, const FactoidDist& d2);

double tv_distance(const FactoidDist& d1, const FactoidDist& d2);

/// When enabled, tv_distance evaluates all three forms and throws
/// std::logic_error if they disagree by more than 1e-12.
void set_tv_cross_check(bool enabled);
bool tv_cross_check_enabled();

/// KL(d_true || d_model) in nats; +infinity when d_true is not absolutely
/// continuous with respect to d_model.
double kl_divergence(const FactoidDist& d_true, const FactoidDist& d_model);

/// weight * a + (1 - weight) * b
FactoidDist mixture(const FactoidDist& a, const FactoidDist& b, double weight);

/// Reusable O(1)-per-draw sampler (Vose alias table over the explicit atoms,
/// uniform index mapping over the background factoids).
class FactoidSampler {
 public:
  explicit FactoidSampler(const FactoidDist& d);
  FactoidId draw(SeededRng& rng) const;

 private:
  std::vector<FactoidId> ids_;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
  std::vector<FactoidId> listed_;
  double background_mass_ = 0.0;
  std::size_t background_count_ = 0;
};

std::vector<FactoidId> sample_iid(const FactoidDist& d, std::size_t n, SeededRng& rng);

namespace detail {

/// The j-th (0-based) id in [0, size) that is not in the sorted list `excluded`.
FactoidId nth_unlisted(std::span<const FactoidId> excluded, std::size_t j);

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

}  // namespace monofact
