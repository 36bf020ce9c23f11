#include "monofact/rng.hpp"

#include "monofact/error.hpp"

namespace monofact {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SeededRng::derive_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~stream_index));
}

// Lemire's multiply-shift with rejection; unbiased.
std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("SeededRng::below: bound must be positive");
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace monofact
