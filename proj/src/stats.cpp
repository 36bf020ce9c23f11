#include "monofact/stats.hpp"

#include <boost/math/distributions/beta.hpp>
#include <cmath>

#include "monofact/error.hpp"

namespace monofact {

Interval clopper_pearson(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw DomainError("clopper_pearson: successes exceed trials");
  const double alpha = 1.0 - level;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  double lo = 0.0;
  double hi = 1.0;
  if (successes > 0) lo = boost::math::quantile(boost::math::beta_distribution<>(x, n - x + 1), alpha / 2);
  if (successes < trials) {
    hi = boost::math::quantile(boost::math::beta_distribution<>(x + 1, n - x), 1 - alpha / 2);
  }
  return {lo, hi};
}

Frequency frequency(std::size_t successes, std::size_t trials) {
  Frequency f;
  f.successes = successes;
  f.trials = trials;
  f.value = trials > 0 ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  f.ci = clopper_pearson(successes, trials);
  return f;
}

Summary summarize(std::span<const double> xs) {
  Summary s;
  double sum = 0.0;
  for (double x : xs) {
    if (!std::isfinite(x)) continue;
    sum += x;
    ++s.count;
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double x : xs) {
    if (std::isfinite(x)) ss += (x - s.mean) * (x - s.mean);
  }
  s.stddev = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
  return s;
}

}  // namespace monofact
