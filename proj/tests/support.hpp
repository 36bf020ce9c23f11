#pragma once

// Hand-rolled generators and brute-force oracles shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "monofact/calibration.hpp"
#include "monofact/core_prob.hpp"
#include "monofact/rng.hpp"

namespace testsupport {

using namespace monofact;

/// Random dense distribution; each factoid is zero with probability zero_prob.
inline FactoidDist random_dist(std::size_t size, SeededRng& rng, double zero_prob = 0.3) {
  std::vector<double> w(size);
  for (double& x : w) x = rng.uniform01() < zero_prob ? 0.0 : rng.uniform01();
  w[rng.below(size)] += 0.5;
  return FactoidDist::from_dense(FactoidUniverse(size), w);
}

/// Random distribution whose values repeat, so exact-value bins are non-trivial.
inline FactoidDist random_tied_dist(std::size_t size, SeededRng& rng) {
  const double levels[] = {0.0, 1.0, 2.0, 4.0, 4.0, 7.0};
  std::vector<double> w(size);
  for (double& x : w) x = levels[rng.below(6)];
  w[rng.below(size)] = 3.0;
  return FactoidDist::from_dense(FactoidUniverse(size), w);
}

inline Partition random_partition(std::size_t size, SeededRng& rng) {
  const std::size_t blocks = 1 + static_cast<std::size_t>(rng.below(size));
  std::vector<std::vector<FactoidId>> b(blocks);
  std::vector<FactoidId> ids(size);
  for (std::size_t i = 0; i < size; ++i) ids[i] = static_cast<FactoidId>(i);
  rng.shuffle(std::span<FactoidId>(ids));
  for (std::size_t i = 0; i < size; ++i) b[i < blocks ? i : rng.below(blocks)].push_back(ids[i]);
  return Partition::from_blocks(FactoidUniverse(size), b);
}

/// max over all 2^|Y| subsets A of d1(A) - d2(A).
inline double brute_tv(const FactoidDist& d1, const FactoidDist& d2) {
  const auto a = d1.dense();
  const auto b = d2.dense();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << a.size()); ++mask) {
    double diff = 0.0;
    for (std::size_t y = 0; y < a.size(); ++y) {
      if (mask >> y & 1u) diff += a[y] - b[y];
    }
    best = std::max(best, diff);
  }
  return best;
}

/// Dense block-averaging straight from the definition.
inline std::vector<double> brute_coarsen(const std::vector<double>& p, const Partition& pi) {
  std::vector<double> out(p.size());
  for (const auto& block : pi.materialize()) {
    double mass = 0.0;
    for (FactoidId y : block) mass += p[y];
    for (FactoidId y : block) out[y] = mass / static_cast<double>(block.size());
  }
  return out;
}

inline double dense_half_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / 2.0;
}

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace testsupport
