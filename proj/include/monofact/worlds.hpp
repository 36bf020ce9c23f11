#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "monofact/core_prob.hpp"
#include "monofact/estimators.hpp"
#include "monofact/rng.hpp"

namespace monofact {

/// One language world: the fact distribution p with F = supp(p) + {bottom}
/// and H = Y \ F.
class WorldInstance {
 public:
  explicit WorldInstance(FactoidDist p);

  const FactoidDist& p() const { return p_; }
  const FactoidUniverse& universe() const { return p_.universe(); }
  const FactoidSet& facts() const { return facts_; }
  FactoidSet hallucinations() const { return facts_.complement(); }

 private:
  FactoidDist p_;
  FactoidSet facts_;
};

/// Picks N facts uniformly among Y \ {bottom}, orders them uniformly at
/// random and sets p(sigma(i)) proportional to i^-k.
struct PermutedPowerLaw {
  std::size_t universe_size;
  std::size_t fact_count;
  double exponent;
};

/// Y = people x dates x foods x locations plus bottom. Every (person, date)
/// slot has exactly one fact with a uniform random (food, location).
struct W5World {
  std::size_t people;
  std::size_t dates;
  std::size_t foods;
  std::size_t locations;

  std::size_t slots() const { return people * dates; }
  std::size_t choices() const { return foods * locations; }
  std::size_t universe_size() const { return 1 + slots() * choices(); }
  FactoidId id_of(std::size_t person, std::size_t date, std::size_t food, std::size_t location) const;
  /// Slot index person * dates + date of a non-bottom factoid.
  std::size_t slot_of(FactoidId y) const;
};

/// One fact type of a multi-type world: a power-law world on its own
/// contiguous index range, mixed in with the given weight.
struct TypeComponent {
  std::size_t range_size;
  std::size_t fact_count;
  double exponent;
  double weight;
};

struct MultiTypeWorld {
  std::vector<TypeComponent> types;
};

struct TypeRange {
  FactoidId first;
  std::size_t size;
  bool contains(FactoidId y) const { return y >= first && y - first < size; }
};

/// A finite prior over world instances.
struct ExplicitWorld {
  std::vector<std::pair<double, WorldInstance>> instances;
};

using WorldModel = std::variant<PermutedPowerLaw, W5World, MultiTypeWorld, ExplicitWorld>;

/// Throws DomainError when the model's parameters violate its invariants.
void validate(const WorldModel& model);
std::size_t universe_size(const WorldModel& model);
/// Contiguous ranges of each fact type, starting right after bottom.
std::vector<TypeRange> type_ranges(const MultiTypeWorld& model);

WorldInstance sample_world(const WorldModel& model, SeededRng& rng);

/// Exact posterior draw for the k = 0 power-law world: the observed facts
/// plus a uniform random completion to N facts among Y \ O.
WorldInstance posterior_sampler_uniform_world(const PermutedPowerLaw& model,
                                              const FactoidSet& observed, SeededRng& rng);

/// ln(|H| / |F|) counted from the instance's sets.
double sparsity(const WorldInstance& world);

struct RegularityReport {
  double s;
  double r_facts;
  double r_probs;
  TrainingSample conditioning_sample;
};

/// Exact posterior enumeration over an explicit prior.
RegularityReport analyze_regularity(const ExplicitWorld& model, const TrainingSample& sample);

/// Same quantities for a W5 world, using the independence of its slots
/// instead of enumerating choices^slots instances.
RegularityReport analyze_regularity(const W5World& model, const TrainingSample& sample);

/// Every instance of a W5 world with its prior weight. Throws DomainError
/// when there would be more than max_instances.
ExplicitWorld enumerate_w5(const W5World& model, std::size_t max_instances = 1'000'000);

/// Sparsity and regularity that hold with probability one for the built-in
/// parametric worlds (r = 1 by symmetry for power-law worlds, r = slots for W5).
/// For multi-type worlds s is the smallest per-type sparsity.
struct KnownRegularity {
  double s;
  double r;
};
KnownRegularity known_regularity(const WorldModel& model);

}  // namespace monofact
