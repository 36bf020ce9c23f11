#pragma once

#include <cstddef>
#include <span>

namespace monofact {

struct Interval {
  double lo;
  double hi;
};

/// Exact (Clopper-Pearson) two-sided binomial interval.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double level = 0.95);

struct Frequency {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double value = 0.0;
  Interval ci{0.0, 1.0};
};
Frequency frequency(std::size_t successes, std::size_t trials);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation (n - 1)
  std::size_t count = 0;
};
/// Non-finite values are skipped.
Summary summarize(std::span<const double> xs);

}  // namespace monofact
