#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "monofact/core_prob.hpp"

namespace monofact {

/// One block of a partition. At most one block of a Partition is the
/// "rest" block: it additionally holds every factoid not listed in any block.
struct Block {
  std::vector<FactoidId> members;  // sorted
  bool holds_rest = false;
};

/// Disjoint cover of Y by non-empty blocks.
class Partition {
 public:
  /// Explicit blocks that must cover the universe exactly.
  static Partition from_blocks(FactoidUniverse universe, std::vector<std::vector<FactoidId>> blocks);
  /// Blocks may leave factoids unlisted when exactly one block is the rest block.
  static Partition from_blocks(FactoidUniverse universe, std::vector<Block> blocks);
  static Partition singletons(FactoidUniverse universe);
  static Partition whole(FactoidUniverse universe);

  const FactoidUniverse& universe() const { return universe_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_size(std::size_t i) const;
  /// Number of factoids that no block lists explicitly.
  std::size_t rest_count() const { return rest_count_; }
  /// Sorted list of every explicitly listed factoid.
  std::span<const FactoidId> listed() const { return listed_; }
  /// Block index of each entry of listed().
  std::span<const std::uint32_t> listed_blocks() const { return listed_block_; }
  std::size_t block_of(FactoidId y) const;

  /// Materialized blocks (small universes only).
  std::vector<std::vector<FactoidId>> materialize() const;

 private:
  Partition(FactoidUniverse universe, std::vector<Block> blocks);

  FactoidUniverse universe_;
  std::vector<Block> blocks_;
  std::vector<FactoidId> listed_;
  std::vector<std::uint32_t> listed_block_;
  std::size_t rest_count_ = 0;
  std::size_t rest_block_ = 0;
};

struct ExactValueBinning {};
struct AdaptiveBinning {
  std::size_t bins;
};
struct FixedWidthBinning {
  double epsilon;
};
using BinningSpec = std::variant<ExactValueBinning, AdaptiveBinning, FixedWidthBinning>;

/// Throws DomainError when the spec's parameters are out of range.
void validate(const BinningSpec& spec);

/// D(B) for every block, in block order.
std::vector<double> block_masses(const FactoidDist& d, const Partition& pi);

/// p^Pi: every factoid of block B receives p(B)/|B|.
FactoidDist coarsen(const FactoidDist& p, const Partition& pi);

/// Blocks of equal g-value (relative tolerance 1e-12), sorted by value.
Partition exact_value_partition(const FactoidDist& g);

/// Thresholds t_1..t_b of the adaptive b-bin partition; t_b == 1.
std::vector<double> adaptive_thresholds(const FactoidDist& g, std::size_t bins);
Partition adaptive_partition(const FactoidDist& g, std::size_t bins);

/// Log-spaced bins ((1-eps)^{i+1}, (1-eps)^i] plus the zero bin. eps == 0 is
/// the exact-value partition and eps == 1 the single block {Y}.
Partition fixed_width_partition(const FactoidDist& g, double epsilon);

Partition binning_partition(const FactoidDist& g, const BinningSpec& spec);

/// TV(p^Pi, g) with Pi built from g by the given binning.
double miscalibration(const FactoidDist& p, const FactoidDist& g, const BinningSpec& spec);

/// (1/2) sum over fixed-width bins B of |p(B) - g(B)|.
double generative_calibration_error(const FactoidDist& p, const FactoidDist& g, double epsilon);

struct ReliabilityRow {
  double bin_value;  // g(B) / |B|
  double g_mass;
  double p_mass;
  std::size_t bin_size;
};
std::vector<ReliabilityRow> reliability_curve(const FactoidDist& p, const FactoidDist& g,
                                              const BinningSpec& spec);

}  // namespace monofact
