#include "monofact/set_partitions.hpp"

#include <algorithm>

#include "monofact/error.hpp"

namespace monofact {

std::vector<std::vector<std::uint8_t>> set_partitions(std::size_t n) {
  if (n == 0) return {{}};
  if (n > 12) throw DomainError("set_partitions: n too large to enumerate");
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> label(n, 0);
  // prefix_max[i] = max(label[0..i])
  std::vector<std::uint8_t> prefix_max(n, 0);
  while (true) {
    out.push_back(label);
    // Rightmost position that can still be incremented.
    std::size_t i = n - 1;
    while (i > 0 && label[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++label[i];
    prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      label[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return out;
}

std::uint64_t bell_number(std::size_t n) {
  if (n > 25) throw DomainError("bell_number: overflow");
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace monofact
