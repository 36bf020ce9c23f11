#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monofact/bounds.hpp"
#include "monofact/calibration.hpp"
#include "monofact/lms.hpp"
#include "monofact/parallel.hpp"
#include "monofact/records.hpp"
#include "monofact/stats.hpp"
#include "monofact/worlds.hpp"

namespace monofact {

/// Bound parameters as configured. Unset s, r and k_types are derived from
/// the world model.
struct BoundSettings {
  double delta = 0.1;
  std::size_t b = 10;
  double epsilon = 0.1;
  std::optional<double> s;
  std::optional<double> r;
  std::optional<std::size_t> k_types;
};

struct ExperimentConfig {
  WorldModel world = PermutedPowerLaw{1000, 10, 0.0};
  std::size_t n = 100;
  LmAlgorithm algorithm = LmAlgorithm::empirical();
  BoundSettings bound;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

/// Throws ConfigError naming the offending key.
void validate(const ExperimentConfig& cfg);
BoundParams resolve_bound_params(const ExperimentConfig& cfg);

/// Everything sampled in one trial.
struct TrialState {
  WorldInstance world;
  TrainingSample sample;
  FactoidDist g;
};
TrialState simulate_trial(const ExperimentConfig& cfg, std::size_t trial_index);

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

struct BoundSummary {
  std::string name;
  Frequency satisfied;
  double vacuous_fraction = 0.0;
  double threshold = 0.0;
  bool gated = false;  ///< counts toward AggregateReport::passed
  bool passed = true;
};

struct MetricSummary {
  std::string name;
  Summary summary;
};

struct AggregateReport {
  std::size_t trials = 0;
  std::vector<BoundSummary> bounds;
  std::vector<MetricSummary> metrics;
  bool passed = true;

  const BoundSummary* bound(const std::string& name) const;
  const MetricSummary* metric(const std::string& name) const;
};

AggregateReport aggregate(const ExperimentConfig& cfg, std::span<const TrialRecord> records);

struct ExperimentResult {
  std::vector<TrialRecord> records;  ///< ordered by trial index
  AggregateReport aggregate;
};
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                Execution execution = Execution::parallel);

/// Push-forward of d through the factoid map of one type: ids in the range
/// become 1..size, everything else becomes bottom.
FactoidDist project_to_type(const FactoidDist& d, const TypeRange& range);
TrainingSample project_to_type(const TrainingSample& s, const TypeRange& range);

/// p over ids 1..atoms of a universe of atoms + 1, with p(i) proportional to i^-exponent.
FactoidDist power_law_dist(std::size_t atoms, double exponent);

// ---------------------------------------------------------------------------

struct EventCheck {
  std::string name;
  Frequency frequency;
  double threshold = 0.0;
  bool at_most = true;  ///< pass iff value <= threshold, else value >= threshold
  bool passed = true;
};

struct SquashCheck {
  double mean_gap = 0.0;  ///< mean(GT) - mean(missing mass)
  double stderr_ = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed = true;
};

struct ConcentrationReport {
  std::size_t trials = 0;
  std::vector<EventCheck> events;
  SquashCheck squash;
  bool passed = true;
};

/// Draws M training samples from p and counts how often the missing mass
/// leaves the two-sided and one-sided Good-Turing radii.
ConcentrationReport run_gt_concentration(const FactoidDist& p, std::size_t n, double delta,
                                         std::size_t trials, std::uint64_t seed,
                                         Execution execution = Execution::parallel);

struct UpperBoundReport {
  std::size_t trials = 0;
  std::vector<EventCheck> events;
  bool passed = true;
};

/// Monofact memorizer on fresh worlds: g(H) <= mf with certainty and
/// Mc_inf <= 3 sqrt(ln(4/delta)/n) with probability 1 - delta.
UpperBoundReport run_upper_bound_check(const WorldModel& world, std::size_t n, double delta,
                                       std::size_t trials, std::uint64_t seed,
                                       Execution execution = Execution::parallel);

struct TheoremProbe {
  std::string label;
  TheoremMainResult result;
};

struct TheoremMainReport {
  std::size_t observed_facts = 0;
  UniformPosteriorTerms closed_form{};
  PosteriorMarginals marginals{};
  bool marginals_agree = true;  ///< closed form within 3 sigma of the estimates
  std::vector<TheoremProbe> probes;
  bool passed = true;
};

/// One world and training sample, then `probes` distinct (g, Pi) pairs.
TheoremMainReport run_theorem_main(const PermutedPowerLaw& model, std::size_t n,
                                   std::size_t probes, std::size_t posterior_samples,
                                   std::uint64_t seed);

/// Random prior over `instances` worlds on a universe of `size`, each with a
/// random non-empty support avoiding bottom.
ExplicitWorld random_explicit_world(std::size_t size, std::size_t instances, SeededRng& rng);

struct BruteForceReport {
  std::size_t priors = 0;
  std::size_t partitions = 0;
  std::size_t subsets = 0;
  std::size_t lemma_violations = 0;
  std::size_t tv_pairs = 0;
  std::size_t tv_mismatches = 0;  ///< max over all subsets vs the closed forms
  bool passed = true;
};

BruteForceReport run_brute_force(std::size_t max_universe, std::size_t priors_per_size,
                                 std::uint64_t seed, Execution execution = Execution::parallel);

}  // namespace monofact
