#include "monofact/core_prob.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "monofact/error.hpp"

namespace monofact {

namespace {

std::atomic<bool> g_tv_cross_check{false};

void require_same_universe(const FactoidUniverse& a, const FactoidUniverse& b, const char* what) {
  if (!(a == b)) {
    throw DomainError(std::string(what) + ": universe mismatch (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
}

// Calls fn(prob_a, prob_b, multiplicity) once per explicit id of either
// distribution and once for the factoids listed in neither.
template <typename Fn>
void visit_pairs(const FactoidDist& a, const FactoidDist& b, Fn&& fn) {
  auto ia = a.atoms().begin();
  auto ib = b.atoms().begin();
  const auto ea = a.atoms().end();
  const auto eb = b.atoms().end();
  std::size_t listed = 0;
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->id < ib->id)) {
      fn(ia->prob, b.background(), std::size_t{1});
      ++ia;
    } else if (ia == ea || ib->id < ia->id) {
      fn(a.background(), ib->prob, std::size_t{1});
      ++ib;
    } else {
      fn(ia->prob, ib->prob, std::size_t{1});
      ++ia;
      ++ib;
    }
    ++listed;
  }
  const std::size_t rest = a.universe().size() - listed;
  if (rest > 0) fn(a.background(), b.background(), rest);
}

}  // namespace

FactoidUniverse::FactoidUniverse(std::size_t size) : size_(size) {
  if (size < 2) throw DomainError("FactoidUniverse: size must be at least 2");
  if (size > std::numeric_limits<FactoidId>::max()) {
    throw DomainError("FactoidUniverse: size exceeds the 32-bit id range");
  }
}

// ---------------------------------------------------------------------------
// FactoidSet

FactoidSet FactoidSet::of(FactoidUniverse universe, std::vector<FactoidId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && !universe.contains(ids.back())) {
    throw DomainError("FactoidSet: id " + std::to_string(ids.back()) + " out of range");
  }
  return FactoidSet(universe, std::move(ids), false);
}

FactoidSet FactoidSet::all_except(FactoidUniverse universe, std::vector<FactoidId> ids) {
  FactoidSet s = of(universe, std::move(ids));
  s.complement_ = true;
  return s;
}

FactoidSet FactoidSet::complement() const { return FactoidSet(universe_, ids_, !complement_); }

bool FactoidSet::contains(FactoidId y) const {
  if (!universe_.contains(y)) return false;
  return std::binary_search(ids_.begin(), ids_.end(), y) != complement_;
}

std::size_t FactoidSet::size() const {
  return complement_ ? universe_.size() - ids_.size() : ids_.size();
}

std::vector<FactoidId> FactoidSet::members() const {
  if (!complement_) return ids_;
  std::vector<FactoidId> out;
  out.reserve(size());
  auto it = ids_.begin();
  for (std::size_t y = 0; y < universe_.size(); ++y) {
    if (it != ids_.end() && *it == y) {
      ++it;
      continue;
    }
    out.push_back(static_cast<FactoidId>(y));
  }
  return out;
}

// ---------------------------------------------------------------------------
// FactoidDist

FactoidDist FactoidDist::from_weights(FactoidUniverse universe, std::span<const Atom> weights,
                                      double background_weight) {
  if (!(background_weight >= 0.0) || !std::isfinite(background_weight)) {
    throw DomainError("dist_from_weights: background weight must be finite and non-negative");
  }
  std::vector<Atom> atoms(weights.begin(), weights.end());
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (!universe.contains(a.id)) {
      throw DomainError("dist_from_weights: index " + std::to_string(a.id) + " out of range");
    }
    if (!std::isfinite(a.prob)) throw DomainError("dist_from_weights: non-finite weight");
    if (a.prob < 0.0) {
      throw DomainError("dist_from_weights: negative weight at index " + std::to_string(a.id));
    }
    if (i > 0 && atoms[i - 1].id == a.id) {
      throw DomainError("dist_from_weights: duplicate index " + std::to_string(a.id));
    }
  }
  if (background_weight == 0.0) {
    std::erase_if(atoms, [](const Atom& a) { return a.prob == 0.0; });
  }
  detail::CompensatedSum total;
  for (const Atom& a : atoms) total.add(a.prob);
  total.add(background_weight * static_cast<double>(universe.size() - atoms.size()));
  const double z = total.value();
  if (!(z > 0.0)) throw DomainError("dist_from_weights: all weights are zero");
  for (Atom& a : atoms) a.prob /= z;
  return FactoidDist(universe, std::move(atoms), background_weight / z);
}

FactoidDist FactoidDist::from_dense(FactoidUniverse universe, std::span<const double> weights) {
  if (weights.size() != universe.size()) {
    throw DomainError("FactoidDist::from_dense: expected " + std::to_string(universe.size()) +
                      " weights, got " + std::to_string(weights.size()));
  }
  std::vector<Atom> atoms;
  atoms.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    atoms.push_back({static_cast<FactoidId>(i), weights[i]});
  }
  return from_weights(universe, atoms);
}

FactoidDist FactoidDist::uniform(FactoidUniverse universe) { return from_weights(universe, {}, 1.0); }

FactoidDist FactoidDist::uniform_over(FactoidUniverse universe, std::span<const FactoidId> ids) {
  std::vector<Atom> atoms;
  atoms.reserve(ids.size());
  for (FactoidId y : ids) atoms.push_back({y, 1.0});
  return from_weights(universe, atoms);
}

FactoidDist FactoidDist::point_mass(FactoidUniverse universe, FactoidId y) {
  const Atom atom{y, 1.0};
  return from_weights(universe, std::span<const Atom>(&atom, 1));
}

double FactoidDist::prob(FactoidId y) const {
  if (!universe_.contains(y)) {
    throw DomainError("FactoidDist::prob: index " + std::to_string(y) + " out of range");
  }
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), y,
                             [](const Atom& a, FactoidId id) { return a.id < id; });
  if (it != atoms_.end() && it->id == y) return it->prob;
  return background_;
}

FactoidSet FactoidDist::support() const {
  std::vector<FactoidId> ids;
  if (background_ > 0.0) {
    for (const Atom& a : atoms_) {
      if (a.prob == 0.0) ids.push_back(a.id);
    }
    return FactoidSet::all_except(universe_, std::move(ids));
  }
  for (const Atom& a : atoms_) {
    if (a.prob > 0.0) ids.push_back(a.id);
  }
  return FactoidSet::of(universe_, std::move(ids));
}

std::vector<double> FactoidDist::dense() const {
  std::vector<double> out(universe_.size(), background_);
  for (const Atom& a : atoms_) out[a.id] = a.prob;
  return out;
}

FactoidDist dist_from_weights(FactoidUniverse universe, const std::map<FactoidId, double>& weights) {
  std::vector<Atom> atoms;
  atoms.reserve(weights.size());
  for (const auto& [id, w] : weights) atoms.push_back({id, w});
  return FactoidDist::from_weights(universe, atoms);
}

// ---------------------------------------------------------------------------
// Set mass and distances

double mass_of_set(const FactoidDist& d, const FactoidSet& s) {
  require_same_universe(d.universe(), s.universe(), "mass_of_set");
  const auto atoms = d.atoms();
  const auto listed = s.listed();
  detail::CompensatedSum sum;
  auto ia = atoms.begin();
  if (!s.is_complement()) {
    for (FactoidId y : listed) {
      while (ia != atoms.end() && ia->id < y) ++ia;
      sum.add(ia != atoms.end() && ia->id == y ? ia->prob : d.background());
    }
    return sum.value();
  }
  // Complement form: atoms outside the excluded list, plus background
  // factoids that are neither atoms nor excluded.
  std::size_t in_union = 0;
  auto il = listed.begin();
  while (ia != atoms.end() || il != listed.end()) {
    if (il == listed.end() || (ia != atoms.end() && ia->id < *il)) {
      sum.add(ia->prob);
      ++ia;
    } else if (ia == atoms.end() || *il < ia->id) {
      ++il;
    } else {
      ++ia;
      ++il;
    }
    ++in_union;
  }
  sum.add(d.background() * static_cast<double>(d.universe().size() - in_union));
  return sum.value();
}

TvForms tv_forms(const FactoidDist& d1, const FactoidDist& d2) {
  require_same_universe(d1.universe(), d2.universe(), "tv_distance");
  detail::CompensatedSum abs_sum;
  detail::CompensatedSum pos_sum;
  visit_pairs(d1, d2, [&](double a, double b, std::size_t k) {
    abs_sum.add(std::abs(a - b) * static_cast<double>(k));
    if (a > b) pos_sum.add((a - b) * static_cast<double>(k));
  });

  // A = {y : d1(y) > d2(y)}, as an explicit set or as a complement.
  std::vector<FactoidId> above;
  std::vector<FactoidId> not_above;
  auto ia = d1.atoms().begin();
  auto ib = d2.atoms().begin();
  while (ia != d1.atoms().end() || ib != d2.atoms().end()) {
    FactoidId y;
    double a;
    double b;
    if (ib == d2.atoms().end() || (ia != d1.atoms().end() && ia->id < ib->id)) {
      y = ia->id, a = ia->prob, b = d2.background();
      ++ia;
    } else if (ia == d1.atoms().end() || ib->id < ia->id) {
      y = ib->id, a = d1.background(), b = ib->prob;
      ++ib;
    } else {
      y = ia->id, a = ia->prob, b = ib->prob;
      ++ia;
      ++ib;
    }
    (a > b ? above : not_above).push_back(y);
  }
  const FactoidSet set_a = d1.background() > d2.background()
                               ? FactoidSet::all_except(d1.universe(), std::move(not_above))
                               : FactoidSet::of(d1.universe(), std::move(above));
  const double by_subset = mass_of_set(d1, set_a) - mass_of_set(d2, set_a);
  return {by_subset, 0.5 * abs_sum.value(), pos_sum.value()};
}

void set_tv_cross_check(bool enabled) { g_tv_cross_check.store(enabled); }
bool tv_cross_check_enabled() { return g_tv_cross_check.load(); }

double tv_distance(const FactoidDist& d1, const FactoidDist& d2) {
  if (tv_cross_check_enabled()) {
    const TvForms f = tv_forms(d1, d2);
    if (std::abs(f.half_l1 - f.positive_part) > 1e-12 ||
        std::abs(f.half_l1 - f.max_over_subsets) > 1e-12) {
      throw std::logic_error("tv_distance: the three total-variation forms disagree");
    }
    return std::clamp(f.half_l1, 0.0, 1.0);
  }
  require_same_universe(d1.universe(), d2.universe(), "tv_distance");
  detail::CompensatedSum abs_sum;
  visit_pairs(d1, d2, [&](double a, double b, std::size_t k) {
    abs_sum.add(std::abs(a - b) * static_cast<double>(k));
  });
  return std::clamp(0.5 * abs_sum.value(), 0.0, 1.0);
}

double kl_divergence(const FactoidDist& d_true, const FactoidDist& d_model) {
  require_same_universe(d_true.universe(), d_model.universe(), "kl_divergence");
  detail::CompensatedSum sum;
  bool infinite = false;
  visit_pairs(d_true, d_model, [&](double a, double b, std::size_t k) {
    if (a == 0.0) return;
    if (b == 0.0) {
      infinite = true;
      return;
    }
    sum.add(static_cast<double>(k) * a * std::log(a / b));
  });
  if (infinite) return std::numeric_limits<double>::infinity();
  return std::max(0.0, sum.value());
}

FactoidDist mixture(const FactoidDist& a, const FactoidDist& b, double weight) {
  require_same_universe(a.universe(), b.universe(), "mixture");
  if (!(weight >= 0.0 && weight <= 1.0)) throw DomainError("mixture: weight must lie in [0,1]");
  std::vector<Atom> atoms;
  atoms.reserve(a.atoms().size() + b.atoms().size());
  auto ia = a.atoms().begin();
  auto ib = b.atoms().begin();
  const double w = weight;
  while (ia != a.atoms().end() || ib != b.atoms().end()) {
    if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->id < ib->id)) {
      atoms.push_back({ia->id, w * ia->prob + (1 - w) * b.background()});
      ++ia;
    } else if (ia == a.atoms().end() || ib->id < ia->id) {
      atoms.push_back({ib->id, w * a.background() + (1 - w) * ib->prob});
      ++ib;
    } else {
      atoms.push_back({ia->id, w * ia->prob + (1 - w) * ib->prob});
      ++ia;
      ++ib;
    }
  }
  return FactoidDist::from_weights(a.universe(), atoms,
                                   w * a.background() + (1 - w) * b.background());
}

// ---------------------------------------------------------------------------
// Sampling

FactoidSampler::FactoidSampler(const FactoidDist& d) {
  background_count_ = d.background_count();
  background_mass_ = d.background() * static_cast<double>(background_count_);
  for (const Atom& a : d.atoms()) listed_.push_back(a.id);

  std::vector<double> scaled;
  double explicit_mass = 0.0;
  for (const Atom& a : d.atoms()) {
    if (a.prob > 0.0) {
      ids_.push_back(a.id);
      scaled.push_back(a.prob);
      explicit_mass += a.prob;
    }
  }
  const std::size_t k = ids_.size();
  if (k == 0) return;
  for (double& s : scaled) s *= static_cast<double>(k) / explicit_mass;

  accept_.assign(k, 1.0);
  alias_.resize(k);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::uint32_t i = 0; i < k; ++i) {
    alias_[i] = i;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t i : small) accept_[i] = 1.0;
  for (std::uint32_t i : large) accept_[i] = 1.0;
}

FactoidId FactoidSampler::draw(SeededRng& rng) const {
  if (background_count_ > 0 && background_mass_ > 0.0 &&
      (ids_.empty() || rng.uniform01() < background_mass_)) {
    const std::size_t j = static_cast<std::size_t>(rng.below(background_count_));
    return detail::nth_unlisted(listed_, j);
  }
  const std::size_t i = static_cast<std::size_t>(rng.below(ids_.size()));
  return rng.uniform01() < accept_[i] ? ids_[i] : ids_[alias_[i]];
}

std::vector<FactoidId> sample_iid(const FactoidDist& d, std::size_t n, SeededRng& rng) {
  if (n == 0) throw DomainError("sample_iid: n must be at least 1");
  const FactoidSampler sampler(d);
  std::vector<FactoidId> out(n);
  for (auto& y : out) y = sampler.draw(rng);
  return out;
}

namespace detail {

FactoidId nth_unlisted(std::span<const FactoidId> excluded, std::size_t j) {
  // excluded[k] - k is non-decreasing; count the entries that sit at or below
  // the j-th free slot.
  std::size_t lo = 0;
  std::size_t hi = excluded.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (static_cast<std::size_t>(excluded[mid]) - mid <= j) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return static_cast<FactoidId>(j + lo);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace detail

}  // namespace monofact
