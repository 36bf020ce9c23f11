#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace monofact {

/// Deterministic 64-bit generator.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard.
/// The standard distributions are not portable across library vendors, so
/// the bounded-integer, unit-interval and shuffle helpers are implemented
/// here on top of the raw 64-bit stream.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  /// Child stream for (master_seed, stream_index); independent of call order.
  static SeededRng derive(std::uint64_t master_seed, std::uint64_t stream_index) {
    return SeededRng(derive_seed(master_seed, stream_index));
  }
  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace monofact
