#include "monofact/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "monofact/error.hpp"

namespace monofact {

namespace {

std::vector<Multiplicity> count_draws(std::vector<FactoidId> sorted) {
  std::sort(sorted.begin(), sorted.end());
  std::vector<Multiplicity> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], j - i});
    i = j;
  }
  return out;
}

FactoidSet observed_set(FactoidUniverse universe, const std::vector<Multiplicity>& counts) {
  std::vector<FactoidId> ids;
  ids.reserve(counts.size() + 1);
  ids.push_back(kBottom);
  for (const auto& m : counts) ids.push_back(m.id);
  return FactoidSet::of(universe, std::move(ids));
}

void check_delta(double delta, double upper, const char* what) {
  if (!(delta > 0.0 && delta <= upper)) {
    throw DomainError(std::string(what) + ": delta out of range");
  }
}

}  // namespace

TrainingSample::TrainingSample(FactoidUniverse universe, std::vector<FactoidId> draws)
    : universe_(universe),
      draws_(std::move(draws)),
      counts_(count_draws(draws_)),
      observed_(observed_set(universe_, counts_)) {}

std::size_t TrainingSample::count_of(FactoidId y) const {
  auto it = std::lower_bound(counts_.begin(), counts_.end(), y,
                             [](const Multiplicity& m, FactoidId id) { return m.id < id; });
  return it != counts_.end() && it->id == y ? it->count : 0;
}

double monofact_estimate(const TrainingSample& s) {
  if (s.n() == 0) throw DomainError("monofact_estimate: empty sample");
  std::size_t singles = 0;
  for (const auto& m : s.counts()) {
    if (m.count == 1 && m.id != kBottom) ++singles;
  }
  return static_cast<double>(singles) / static_cast<double>(s.n());
}

double good_turing_estimate(const TrainingSample& s) {
  if (s.n() == 0) throw DomainError("good_turing_estimate: empty sample");
  std::size_t singles = 0;
  for (const auto& m : s.counts()) {
    if (m.count == 1) ++singles;
  }
  return static_cast<double>(singles) / static_cast<double>(s.n());
}

double missing_mass(const FactoidDist& p, const TrainingSample& s) {
  if (!(p.universe() == s.universe())) throw DomainError("missing_mass: universe mismatch");
  return std::clamp(mass_of_set(p, s.unobserved()), 0.0, 1.0);
}

double good_turing_radius(double delta, std::size_t n) {
  check_delta(delta, 1.0, "good_turing_radius");
  if (n == 0) throw DomainError("good_turing_radius: n must be at least 1");
  return 3.0 * std::sqrt(std::log(4.0 / delta) / static_cast<double>(n));
}

double missing_mass_lower_radius(double delta, std::size_t n) {
  check_delta(delta, 1.0 / 3.0 + 1e-15, "missing_mass_lower_radius");
  if (n == 0) throw DomainError("missing_mass_lower_radius: n must be at least 1");
  return std::sqrt(6.0 * std::log(2.0 / delta) / static_cast<double>(n));
}

double good_turing_radius_loose_constant(double delta, std::size_t n) {
  check_delta(delta, 1.0, "good_turing_radius_loose_constant");
  if (n == 0) throw DomainError("good_turing_radius_loose_constant: n must be at least 1");
  const double nd = static_cast<double>(n);
  return 1.0 / nd + 2.42 * std::sqrt(std::log(4.0 / delta) / nd);
}

double missing_mass_lower_radius_loose_constant(double delta, std::size_t n) {
  check_delta(delta, 1.0, "missing_mass_lower_radius_loose_constant");
  if (n == 0) throw DomainError("missing_mass_lower_radius_loose_constant: n must be at least 1");
  const double nd = static_cast<double>(n);
  return 1.0 / nd + 2.14 * std::sqrt(std::log(2.0 / delta) / nd);
}

}  // namespace monofact
