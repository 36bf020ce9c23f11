#pragma once

// Right-hand sides of the hallucination lower bounds and the verifiers that
// check the underlying theorem and lemma directly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "monofact/calibration.hpp"
#include "monofact/parallel.hpp"
#include "monofact/stats.hpp"
#include "monofact/worlds.hpp"

namespace monofact {

struct BoundParams {
  double delta = 0.1;
  std::size_t b = 10;
  double epsilon = 0.1;
  double s = 0.0;
  double r = 1.0;
  std::size_t n = 1;
  std::size_t k_types = 1;
};

void validate(const BoundParams& params);

struct BoundEvaluation {
  double lhs = 0.0;  ///< observed g(H)
  double rhs = 0.0;
  bool satisfied = true;
  bool vacuous = false;  ///< rhs <= 0 carries no information
};

/// satisfied = lhs >= rhs - 1e-12; vacuous = rhs <= 0.
BoundEvaluation evaluate_bound(double lhs, double rhs);

/// sqrt(6 ln(6/delta)/n): the Good-Turing term shared by every corollary.
double concentration_term(double delta, std::size_t n);

/// mf - mc - 3 e^-s / delta - sqrt(6 ln(6/delta)/n)
double cor1_rhs(double mf, double mc, const BoundParams& params);
/// Regular facts only: third term 3 r n e^-s / delta.
double cor_balfact_rhs(double mf, double mc, const BoundParams& params);
/// Diagnostic form of cor_balfact_rhs with the observed |O| in place of n.
double cor_balfact_observed_rhs(double mf, double mc, std::size_t observed_count,
                                const BoundParams& params);
/// Regular facts and probabilities: third term 3 r e^-s / delta.
double cor_general_rhs(double mf, double mc, const BoundParams& params);
/// Per fact type with a union bound over k types: 3 k e^-s / delta and ln(6k/delta).
double cor_types_rhs(double mf_i, double mc_i, const BoundParams& params);

enum class FixedWidthVariant {
  tv,   ///< uses TV(p^{B(g,eps)}, g)
  mis,  ///< uses the generative calibration error and subtracts eps
};
double cor_fixed_width_rhs(double mf, double calibration_term, const BoundParams& params,
                           FixedWidthVariant variant);

// ---------------------------------------------------------------------------
// Posterior expectation bound for the k = 0 power-law world.

/// max_{y in U} Pr[y in F] + |O| max_{y in U} E[p(y)] for the uniform world,
/// in closed form from the hypergeometric posterior.
struct UniformPosteriorTerms {
  double max_fact_prob;  ///< (N - m) / |U|
  double max_mean_prob;  ///< (N - m) / (N |U|)
  double rhs;            ///< max_fact_prob + |O| * max_mean_prob
};
UniformPosteriorTerms uniform_posterior_terms(std::size_t universe_size, std::size_t fact_count,
                                              std::size_t observed_facts);

/// Posterior marginals over U estimated from posterior draws.
struct PosteriorMarginals {
  double max_fact_freq;
  double max_fact_stderr;
  double max_mean_prob;
  double max_mean_stderr;
};
PosteriorMarginals estimate_posterior_marginals(const PermutedPowerLaw& model,
                                                const FactoidSet& observed, std::size_t samples,
                                                SeededRng& rng);

struct TheoremMainResult {
  double lhs_mean;
  double lhs_stderr;
  double rhs_exact;
  bool passed;  ///< lhs_mean <= rhs_exact + 3 * lhs_stderr
};

/// E_{p~posterior}[(p(U) - TV(p^Pi, g) - g(H))_+] estimated by posterior draws
/// against its closed-form bound. Requires a k = 0 power-law model.
TheoremMainResult verify_theorem_main_mc(const PermutedPowerLaw& model, const FactoidSet& observed,
                                         const FactoidDist& g, const Partition& pi,
                                         std::size_t samples, SeededRng& rng);

// ---------------------------------------------------------------------------
// Exhaustive check of E[(p(S) - p^Pi(S))_+] <= |Y \ S| max_{y in S} E[p(y)].

struct LemmaViolation {
  std::vector<std::uint8_t> partition;  ///< restricted growth string
  std::uint32_t subset_mask;
  double lhs;
  double rhs;
};

struct LemmaSweep {
  std::size_t partitions = 0;
  std::size_t subsets = 0;
  std::vector<LemmaViolation> violations;
};

/// Every partition of Y times every non-empty S. Universe size at most 6.
LemmaSweep verify_lemma_meat_exhaustive(const ExplicitWorld& prior, double tolerance,
                                        Execution execution = Execution::parallel);

}  // namespace monofact
