#include "monofact/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monofact/error.hpp"

namespace monofact {

namespace {

constexpr double kValueRelTol = 1e-12;
constexpr double kCdfTol = 1e-12;

// Factoids sharing one g-value (up to relative tolerance), ascending by value.
struct ValueGroup {
  double value = 0.0;
  double mass = 0.0;
  std::vector<FactoidId> members;
  bool holds_rest = false;
};

bool same_value(double a, double b) {
  return std::abs(a - b) <= kValueRelTol * std::max(std::abs(a), std::abs(b));
}

std::vector<ValueGroup> value_groups(const FactoidDist& g) {
  std::vector<Atom> atoms(g.atoms().begin(), g.atoms().end());
  const bool has_rest = g.background_count() > 0;
  constexpr FactoidId kRestMarker = std::numeric_limits<FactoidId>::max();
  if (has_rest) atoms.push_back({kRestMarker, g.background()});
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.prob < b.prob; });

  std::vector<ValueGroup> groups;
  for (const Atom& a : atoms) {
    if (groups.empty() || !same_value(groups.back().value, a.prob)) {
      groups.push_back(ValueGroup{a.prob, 0.0, {}, false});
    }
    ValueGroup& grp = groups.back();
    if (a.id == kRestMarker) {
      grp.holds_rest = true;
      grp.mass += g.background() * static_cast<double>(g.background_count());
    } else {
      grp.members.push_back(a.id);
      grp.mass += a.prob;
    }
  }
  for (ValueGroup& grp : groups) std::sort(grp.members.begin(), grp.members.end());
  return groups;
}

// Merges value groups that map to the same bin key. Keys must be
// non-decreasing along the ascending group order.
template <typename KeyFn>
Partition merge_groups(const FactoidDist& g, const std::vector<ValueGroup>& groups, KeyFn key_of) {
  std::vector<Block> blocks;
  long long current_key = std::numeric_limits<long long>::min();
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const long long key = key_of(j);
    if (blocks.empty() || key != current_key) {
      blocks.emplace_back();
      current_key = key;
    }
    Block& b = blocks.back();
    b.members.insert(b.members.end(), groups[j].members.begin(), groups[j].members.end());
    b.holds_rest = b.holds_rest || groups[j].holds_rest;
  }
  for (Block& b : blocks) std::sort(b.members.begin(), b.members.end());
  return Partition::from_blocks(g.universe(), std::move(blocks));
}

}  // namespace

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(FactoidUniverse universe, std::vector<Block> blocks)
    : universe_(universe), blocks_(std::move(blocks)) {
  std::vector<std::pair<FactoidId, std::uint32_t>> tagged;
  std::size_t rest_blocks = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    Block& b = blocks_[i];
    std::sort(b.members.begin(), b.members.end());
    if (b.holds_rest) {
      ++rest_blocks;
      rest_block_ = i;
    }
    for (FactoidId y : b.members) {
      if (!universe_.contains(y)) {
        throw DomainError("Partition: index " + std::to_string(y) + " out of range");
      }
      tagged.emplace_back(y, static_cast<std::uint32_t>(i));
    }
  }
  if (rest_blocks > 1) throw DomainError("Partition: more than one rest block");
  std::sort(tagged.begin(), tagged.end());
  for (std::size_t k = 1; k < tagged.size(); ++k) {
    if (tagged[k].first == tagged[k - 1].first) {
      throw DomainError("Partition: blocks overlap at index " + std::to_string(tagged[k].first));
    }
  }
  listed_.reserve(tagged.size());
  listed_block_.reserve(tagged.size());
  for (const auto& [y, blk] : tagged) {
    listed_.push_back(y);
    listed_block_.push_back(blk);
  }
  rest_count_ = universe_.size() - listed_.size();
  if (rest_count_ > 0 && rest_blocks == 0) {
    throw DomainError("Partition: blocks do not cover the universe");
  }
  if (rest_count_ == 0 && rest_blocks == 1) blocks_[rest_block_].holds_rest = false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (block_size(i) == 0) throw DomainError("Partition: empty block");
  }
}

Partition Partition::from_blocks(FactoidUniverse universe,
                                 std::vector<std::vector<FactoidId>> blocks) {
  std::vector<Block> bs;
  bs.reserve(blocks.size());
  for (auto& members : blocks) bs.push_back(Block{std::move(members), false});
  return Partition(universe, std::move(bs));
}

Partition Partition::from_blocks(FactoidUniverse universe, std::vector<Block> blocks) {
  return Partition(universe, std::move(blocks));
}

Partition Partition::singletons(FactoidUniverse universe) {
  std::vector<std::vector<FactoidId>> blocks(universe.size());
  for (std::size_t y = 0; y < universe.size(); ++y) blocks[y] = {static_cast<FactoidId>(y)};
  return from_blocks(universe, std::move(blocks));
}

Partition Partition::whole(FactoidUniverse universe) {
  return Partition(universe, {Block{{}, true}});
}

std::size_t Partition::block_size(std::size_t i) const {
  const Block& b = blocks_.at(i);
  return b.members.size() + (b.holds_rest ? rest_count_ : 0);
}

std::size_t Partition::block_of(FactoidId y) const {
  if (!universe_.contains(y)) throw DomainError("Partition::block_of: index out of range");
  auto it = std::lower_bound(listed_.begin(), listed_.end(), y);
  if (it != listed_.end() && *it == y) return listed_block_[it - listed_.begin()];
  return rest_block_;
}

std::vector<std::vector<FactoidId>> Partition::materialize() const {
  std::vector<std::vector<FactoidId>> out(blocks_.size());
  for (std::size_t y = 0; y < universe_.size(); ++y) {
    out[block_of(static_cast<FactoidId>(y))].push_back(static_cast<FactoidId>(y));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coarsening

void validate(const BinningSpec& spec) {
  if (const auto* a = std::get_if<AdaptiveBinning>(&spec); a && a->bins < 1) {
    throw DomainError("adaptive binning requires b >= 1");
  }
  if (const auto* f = std::get_if<FixedWidthBinning>(&spec);
      f && !(f->epsilon >= 0.0 && f->epsilon <= 1.0)) {
    throw DomainError("fixed-width binning requires 0 <= epsilon <= 1");
  }
}

std::vector<double> block_masses(const FactoidDist& d, const Partition& pi) {
  if (!(d.universe() == pi.universe())) throw DomainError("coarsen: partition/universe mismatch");
  std::vector<detail::CompensatedSum> sums(pi.block_count());
  const auto listed = pi.listed();
  const auto atoms = d.atoms();
  auto ia = atoms.begin();
  std::size_t atoms_outside = 0;
  detail::CompensatedSum rest;
  for (std::size_t k = 0; k < listed.size(); ++k) {
    const FactoidId y = listed[k];
    while (ia != atoms.end() && ia->id < y) {
      rest.add(ia->prob);
      ++atoms_outside;
      ++ia;
    }
    double py = d.background();
    if (ia != atoms.end() && ia->id == y) {
      py = ia->prob;
      ++ia;
    }
    sums[pi.listed_blocks()[k]].add(py);
  }
  for (; ia != atoms.end(); ++ia) {
    rest.add(ia->prob);
    ++atoms_outside;
  }
  std::vector<double> out(pi.block_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sums[i].value();
  if (pi.rest_count() > 0) {
    rest.add(d.background() * static_cast<double>(pi.rest_count() - atoms_outside));
    // The rest block is the one with holds_rest set.
    for (std::size_t i = 0; i < pi.block_count(); ++i) {
      if (pi.blocks()[i].holds_rest) out[i] += rest.value();
    }
  }
  return out;
}

FactoidDist coarsen(const FactoidDist& p, const Partition& pi) {
  // p(Y) = 1 exactly, so one block is the uniform distribution without rounding.
  if (pi.block_count() == 1) {
    if (!(p.universe() == pi.universe())) throw DomainError("coarsen: partition/universe mismatch");
    return FactoidDist::uniform(p.universe());
  }
  const std::vector<double> masses = block_masses(p, pi);
  std::vector<double> level(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    level[i] = masses[i] / static_cast<double>(pi.block_size(i));
  }
  std::vector<Atom> atoms;
  atoms.reserve(pi.listed().size());
  for (std::size_t k = 0; k < pi.listed().size(); ++k) {
    atoms.push_back({pi.listed()[k], level[pi.listed_blocks()[k]]});
  }
  double background = 0.0;
  if (pi.rest_count() > 0) {
    for (std::size_t i = 0; i < pi.block_count(); ++i) {
      if (pi.blocks()[i].holds_rest) background = level[i];
    }
  }
  return FactoidDist::from_weights(p.universe(), atoms, background);
}

// ---------------------------------------------------------------------------
// Binnings

Partition exact_value_partition(const FactoidDist& g) {
  const auto groups = value_groups(g);
  return merge_groups(g, groups, [](std::size_t j) { return static_cast<long long>(j); });
}

namespace {

// Index of the value group at which each threshold t_i sits; groups.size()
// stands for t_i = 1. t_i = sup{z : C(z) <= i/b} where C is the right-continuous
// cumulative g-mass, so the sup is the first distinct value whose cumulative
// mass exceeds i/b.
std::vector<std::size_t> threshold_groups(const std::vector<ValueGroup>& groups, std::size_t bins) {
  std::vector<double> cdf(groups.size());
  detail::CompensatedSum acc;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    acc.add(groups[j].mass);
    cdf[j] = acc.value();
  }
  std::vector<std::size_t> at(bins, groups.size());
  for (std::size_t i = 1; i < bins; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(bins);
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (cdf[j] > level + kCdfTol) {
        at[i - 1] = j;
        break;
      }
    }
  }
  return at;
}

}  // namespace

std::vector<double> adaptive_thresholds(const FactoidDist& g, std::size_t bins) {
  if (bins < 1) throw DomainError("adaptive_partition: b must be at least 1");
  const auto groups = value_groups(g);
  const auto at = threshold_groups(groups, bins);
  std::vector<double> t(bins, 1.0);
  for (std::size_t i = 0; i < bins; ++i) {
    if (at[i] < groups.size()) t[i] = groups[at[i]].value;
  }
  return t;
}

Partition adaptive_partition(const FactoidDist& g, std::size_t bins) {
  if (bins < 1) throw DomainError("adaptive_partition: b must be at least 1");
  const auto groups = value_groups(g);
  const auto at = threshold_groups(groups, bins);
  // Group j lands in the first bin whose upper threshold is at or above it.
  return merge_groups(g, groups, [&](std::size_t j) {
    for (std::size_t i = 0; i < bins; ++i) {
      if (j <= at[i]) return static_cast<long long>(i);
    }
    return static_cast<long long>(bins - 1);
  });
}

Partition fixed_width_partition(const FactoidDist& g, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("fixed_width_partition: epsilon must lie in [0,1]");
  }
  if (epsilon == 0.0) return exact_value_partition(g);
  if (epsilon == 1.0) return Partition::whole(g.universe());
  const double ratio = 1.0 - epsilon;
  const double log_ratio = std::log(ratio);
  const auto groups = value_groups(g);
  // Bin i holds values in (ratio^{i+1}, ratio^i]; the zero bin sorts first.
  // Keys decrease with i so that they increase along ascending values.
  return merge_groups(g, groups, [&](std::size_t j) -> long long {
    const double v = groups[j].value;
    if (v <= 0.0) return std::numeric_limits<long long>::min() + 1;
    auto i = static_cast<long long>(std::floor(std::log(v) / log_ratio));
    i = std::max<long long>(i, 0);
    while (std::pow(ratio, static_cast<double>(i + 1)) >= v) ++i;
    while (i > 0 && std::pow(ratio, static_cast<double>(i)) < v) --i;
    return -i;
  });
}

Partition binning_partition(const FactoidDist& g, const BinningSpec& spec) {
  validate(spec);
  return std::visit(
      [&](const auto& s) -> Partition {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExactValueBinning>) {
          return exact_value_partition(g);
        } else if constexpr (std::is_same_v<T, AdaptiveBinning>) {
          return adaptive_partition(g, s.bins);
        } else {
          return fixed_width_partition(g, s.epsilon);
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// Metrics

double miscalibration(const FactoidDist& p, const FactoidDist& g, const BinningSpec& spec) {
  if (!(p.universe() == g.universe())) throw DomainError("miscalibration: universe mismatch");
  return tv_distance(coarsen(p, binning_partition(g, spec)), g);
}

double generative_calibration_error(const FactoidDist& p, const FactoidDist& g, double epsilon) {
  if (!(p.universe() == g.universe())) {
    throw DomainError("generative_calibration_error: universe mismatch");
  }
  const Partition pi = fixed_width_partition(g, epsilon);
  const auto pm = block_masses(p, pi);
  const auto gm = block_masses(g, pi);
  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < pm.size(); ++i) sum.add(std::abs(pm[i] - gm[i]));
  return std::clamp(0.5 * sum.value(), 0.0, 1.0);
}

std::vector<ReliabilityRow> reliability_curve(const FactoidDist& p, const FactoidDist& g,
                                              const BinningSpec& spec) {
  if (!(p.universe() == g.universe())) throw DomainError("reliability_curve: universe mismatch");
  const Partition pi = binning_partition(g, spec);
  const auto pm = block_masses(p, pi);
  const auto gm = block_masses(g, pi);
  std::vector<ReliabilityRow> rows;
  rows.reserve(pm.size());
  for (std::size_t i = 0; i < pm.size(); ++i) {
    const std::size_t size = pi.block_size(i);
    rows.push_back({gm[i] / static_cast<double>(size), gm[i], pm[i], size});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReliabilityRow& a, const ReliabilityRow& b) {
    return a.bin_value < b.bin_value;
  });
  return rows;
}

}  // namespace monofact
