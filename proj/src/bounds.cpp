#include "monofact/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "monofact/error.hpp"
#include "monofact/estimators.hpp"
#include "monofact/lms.hpp"
#include "monofact/records.hpp"
#include "monofact/set_partitions.hpp"

namespace monofact {

void validate(const BoundParams& p) {
  if (!(p.delta > 0.0 && p.delta <= 1.0)) throw DomainError("bound: delta must lie in (0,1]");
  if (p.b < 1) throw DomainError("bound: b must be at least 1");
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) throw DomainError("bound: epsilon must lie in [0,1]");
  if (!(p.r >= 1.0)) throw DomainError("bound: r must be at least 1");
  if (p.n < 1) throw DomainError("bound: n must be at least 1");
  if (p.k_types < 1) throw DomainError("bound: k_types must be at least 1");
  if (std::isnan(p.s)) throw DomainError("bound: s is not a number");
}

BoundEvaluation evaluate_bound(double lhs, double rhs) {
  BoundEvaluation e;
  e.lhs = lhs;
  e.rhs = rhs;
  e.vacuous = rhs <= 0.0;
  e.satisfied = lhs >= rhs - 1e-12;
  return e;
}

double concentration_term(double delta, std::size_t n) {
  // The one-sided Good-Turing radius at confidence delta / 3.
  return missing_mass_lower_radius(delta / 3.0, n);
}

namespace {

double sparsity_term(double multiplier, const BoundParams& p) {
  return 3.0 * multiplier * std::exp(-p.s) / p.delta;
}

}  // namespace

double cor1_rhs(double mf, double mc, const BoundParams& p) {
  return mf - mc - sparsity_term(1.0, p) - concentration_term(p.delta, p.n);
}

double cor_balfact_rhs(double mf, double mc, const BoundParams& p) {
  return mf - mc - sparsity_term(p.r * static_cast<double>(p.n), p) -
         concentration_term(p.delta, p.n);
}

double cor_balfact_observed_rhs(double mf, double mc, std::size_t observed_count,
                                const BoundParams& p) {
  return mf - mc - sparsity_term(p.r * static_cast<double>(observed_count), p) -
         concentration_term(p.delta, p.n);
}

double cor_general_rhs(double mf, double mc, const BoundParams& p) {
  return mf - mc - sparsity_term(p.r, p) - concentration_term(p.delta, p.n);
}

double cor_types_rhs(double mf_i, double mc_i, const BoundParams& p) {
  const auto k = static_cast<double>(p.k_types);
  return mf_i - mc_i - sparsity_term(k, p) - concentration_term(p.delta / k, p.n);
}

double cor_fixed_width_rhs(double mf, double calibration_term, const BoundParams& p,
                           FixedWidthVariant variant) {
  const double base = mf - calibration_term - sparsity_term(1.0, p) - concentration_term(p.delta, p.n);
  return variant == FixedWidthVariant::mis ? base - p.epsilon : base;
}

// ---------------------------------------------------------------------------

UniformPosteriorTerms uniform_posterior_terms(std::size_t universe_size, std::size_t fact_count,
                                              std::size_t observed_facts) {
  if (observed_facts > fact_count) throw DomainError("uniform_posterior_terms: m exceeds N");
  if (universe_size < observed_facts + 1) throw DomainError("uniform_posterior_terms: |O| > |Y|");
  const std::size_t unobserved = universe_size - 1 - observed_facts;
  if (unobserved == 0) return {0.0, 0.0, 0.0};
  // Given the sample, F \ O is a uniform (N - m)-subset of U, so every y in U
  // is a fact with probability (N - m)/|U| and then carries mass 1/N.
  const double fact_prob =
      static_cast<double>(fact_count - observed_facts) / static_cast<double>(unobserved);
  const double mean_prob = fact_prob / static_cast<double>(fact_count);
  return {fact_prob, mean_prob, fact_prob + static_cast<double>(observed_facts + 1) * mean_prob};
}

namespace {

std::size_t observed_facts(const FactoidSet& observed) {
  if (observed.is_complement()) throw DomainError("observed set must be listed explicitly");
  return observed.size() - (observed.contains(kBottom) ? 1 : 0);
}

FactoidSet with_bottom(const FactoidSet& observed) {
  std::vector<FactoidId> ids(observed.listed().begin(), observed.listed().end());
  ids.push_back(kBottom);
  return FactoidSet::of(observed.universe(), std::move(ids));
}

}  // namespace

PosteriorMarginals estimate_posterior_marginals(const PermutedPowerLaw& model,
                                                const FactoidSet& observed, std::size_t samples,
                                                SeededRng& rng) {
  if (samples < 2) throw DomainError("estimate_posterior_marginals: need at least 2 samples");
  const FactoidSet obs = with_bottom(observed);
  const std::size_t size = model.universe_size;
  std::vector<double> hits(size, 0.0);
  std::vector<double> mass(size, 0.0);
  std::vector<double> mass_sq(size, 0.0);
  for (std::size_t k = 0; k < samples; ++k) {
    const WorldInstance w = posterior_sampler_uniform_world(model, obs, rng);
    for (const Atom& a : w.p().atoms()) {
      hits[a.id] += 1.0;
      mass[a.id] += a.prob;
      mass_sq[a.id] += a.prob * a.prob;
    }
  }
  const auto m = static_cast<double>(samples);
  PosteriorMarginals out{0.0, 0.0, 0.0, 0.0};
  for (std::size_t y = 0; y < size; ++y) {
    if (obs.contains(static_cast<FactoidId>(y))) continue;
    const double f = hits[y] / m;
    if (f >= out.max_fact_freq) {
      out.max_fact_freq = f;
      out.max_fact_stderr = std::sqrt(f * (1.0 - f) / m);
    }
    const double mean = mass[y] / m;
    if (mean >= out.max_mean_prob) {
      const double var = std::max(0.0, (mass_sq[y] - m * mean * mean) / (m - 1.0));
      out.max_mean_prob = mean;
      out.max_mean_stderr = std::sqrt(var / m);
    }
  }
  return out;
}

TheoremMainResult verify_theorem_main_mc(const PermutedPowerLaw& model, const FactoidSet& observed,
                                         const FactoidDist& g, const Partition& pi,
                                         std::size_t samples, SeededRng& rng) {
  if (model.exponent != 0.0) {
    throw UnsupportedModel("verify_theorem_main_mc: exact posterior only for exponent 0");
  }
  if (samples < 2) throw DomainError("verify_theorem_main_mc: need at least 2 samples");
  if (g.universe().size() != model.universe_size || !(pi.universe() == g.universe())) {
    throw DomainError("verify_theorem_main_mc: universe mismatch");
  }
  const FactoidSet obs = with_bottom(observed);
  const FactoidSet unobserved = obs.complement();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const WorldInstance w = posterior_sampler_uniform_world(model, obs, rng);
    const double p_u = mass_of_set(w.p(), unobserved);
    const double tv = tv_distance(coarsen(w.p(), pi), g);
    const double g_h = hallucination_rate(g, w);
    const double x = std::max(0.0, p_u - tv - g_h);
    sum += x;
    sum_sq += x * x;
  }
  const auto m = static_cast<double>(samples);
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  const double stderr_ = std::sqrt(var / m);
  const double rhs =
      uniform_posterior_terms(model.universe_size, model.fact_count, observed_facts(obs)).rhs;
  return {mean, stderr_, rhs, mean <= rhs + 3.0 * stderr_};
}

// ---------------------------------------------------------------------------

LemmaSweep verify_lemma_meat_exhaustive(const ExplicitWorld& prior, double tolerance,
                                        Execution execution) {
  validate(WorldModel{prior});
  const std::size_t size = prior.instances.front().second.universe().size();
  if (size > 6) throw DomainError("verify_lemma_meat_exhaustive: universe larger than 6");

  const std::size_t count = prior.instances.size();
  std::vector<double> weight(count);
  std::vector<std::vector<double>> dense(count);
  std::vector<double> mean_p(size, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    weight[j] = prior.instances[j].first;
    dense[j] = prior.instances[j].second.p().dense();
    for (std::size_t y = 0; y < size; ++y) mean_p[y] += weight[j] * dense[j][y];
  }

  const auto partitions = set_partitions(size);
  const std::uint32_t full = (1u << size) - 1;
  std::vector<std::vector<LemmaViolation>> found(partitions.size());

  auto check_partition = [&](std::size_t idx) {
    const auto& label = partitions[idx];
    const std::size_t blocks = *std::max_element(label.begin(), label.end()) + 1u;
    std::vector<std::uint32_t> block_mask(blocks, 0);
    for (std::size_t y = 0; y < size; ++y) block_mask[label[y]] |= 1u << y;
    std::vector<std::vector<double>> block_mass(count, std::vector<double>(blocks, 0.0));
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t y = 0; y < size; ++y) block_mass[j][label[y]] += dense[j][y];
    }
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        double p_s = 0.0;
        for (std::size_t y = 0; y < size; ++y) {
          if (mask >> y & 1u) p_s += dense[j][y];
        }
        double q_s = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
          const auto in_s = static_cast<double>(__builtin_popcount(block_mask[b] & mask));
          const auto bsize = static_cast<double>(__builtin_popcount(block_mask[b]));
          q_s += block_mass[j][b] * in_s / bsize;
        }
        lhs += weight[j] * std::max(0.0, p_s - q_s);
      }
      double max_mean = 0.0;
      for (std::size_t y = 0; y < size; ++y) {
        if (mask >> y & 1u) max_mean = std::max(max_mean, mean_p[y]);
      }
      const double rhs = static_cast<double>(size - __builtin_popcount(mask)) * max_mean;
      if (lhs > rhs + tolerance) found[idx].push_back({label, mask, lhs, rhs});
    }
  };

  const auto total = static_cast<long long>(partitions.size());
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long idx = 0; idx < total; ++idx) check_partition(static_cast<std::size_t>(idx));
  } else {
    for (long long idx = 0; idx < total; ++idx) check_partition(static_cast<std::size_t>(idx));
  }

  LemmaSweep sweep;
  sweep.partitions = partitions.size();
  sweep.subsets = full;
  for (auto& v : found) {
    sweep.violations.insert(sweep.violations.end(), v.begin(), v.end());
  }
  return sweep;
}

// ---------------------------------------------------------------------------

MarkovStepReport verify_markov_step(std::span<const TrialRecord> trials, double delta) {
  if (trials.size() < 100) throw DomainError("verify_markov_step: need at least 100 trials");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("verify_markov_step: delta out of range");
  std::size_t markov_known = 0;
  std::size_t markov_hits = 0;
  std::size_t mm_hits = 0;
  for (const TrialRecord& t : trials) {
    if (t.markov_event) {
      ++markov_known;
      if (*t.markov_event) ++markov_hits;
    }
    if (t.missing_mass_event) ++mm_hits;
  }
  MarkovStepReport r;
  r.markov_event = frequency(markov_hits, markov_known);
  r.missing_mass_event = frequency(mm_hits, trials.size());
  r.markov_threshold = 1.0 - 2.0 * delta / 3.0;
  r.missing_mass_threshold = 1.0 - delta / 3.0;
  r.passed = (markov_known == 0 || r.markov_event.value >= r.markov_threshold) &&
             r.missing_mass_event.value >= r.missing_mass_threshold;
  return r;
}

}  // namespace monofact
