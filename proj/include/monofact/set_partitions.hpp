#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace monofact {

/// Every set partition of {0, ..., n-1} as a restricted growth string:
/// label[0] = 0 and label[i] <= 1 + max(label[0..i-1]). Lexicographic order.
std::vector<std::vector<std::uint8_t>> set_partitions(std::size_t n);

/// Bell number B(n) by the Bell triangle.
std::uint64_t bell_number(std::size_t n);

}  // namespace monofact
