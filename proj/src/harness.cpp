#include "monofact/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <type_traits>
#include <unordered_set>

#include "monofact/error.hpp"
#include "monofact/estimators.hpp"

namespace monofact {

namespace {

constexpr double kTol = 1e-12;

// Runs body(i) for every trial and returns the results in trial order. The
// first failing trial (by index) is rethrown with its index attached.
template <typename R, typename F>
std::vector<R> for_trials(std::size_t trials, Execution execution, F&& body) {
  std::vector<R> out(trials);
  std::vector<std::exception_ptr> errors(trials);
  auto run = [&](std::size_t i) {
    try {
      out[i] = body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto total = static_cast<long long>(trials);
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < total; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < total; ++i) run(static_cast<std::size_t>(i));
  }
  for (std::size_t i = 0; i < trials; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw TrialError(i, e.what());
    }
  }
  return out;
}

bool is_multi_type(const WorldModel& w) { return std::holds_alternative<MultiTypeWorld>(w); }

std::optional<double> posterior_term(const WorldModel& model, const TrainingSample& sample) {
  const FactoidSet& observed = sample.observed();
  const std::size_t o = observed.size();
  const std::size_t unobserved = sample.universe().size() - o;
  if (const auto* m = std::get_if<PermutedPowerLaw>(&model)) {
    if (unobserved == 0) return 0.0;
    const std::size_t facts = o - 1;
    if (m->exponent == 0.0) return uniform_posterior_terms(m->universe_size, m->fact_count, facts).rhs;
    // Every y in U is a fact with probability (N - m)/|U| by symmetry, and
    // E[p(y)] = E[p(U)]/|U| <= 1/|U|.
    const auto u = static_cast<double>(unobserved);
    return static_cast<double>(m->fact_count - facts) / u + static_cast<double>(o) / u;
  }
  if (const auto* w = std::get_if<W5World>(&model)) {
    std::unordered_set<std::size_t> filled;
    for (FactoidId y : observed.listed()) {
      if (y != kBottom) filled.insert(w->slot_of(y));
    }
    if (filled.size() == w->slots()) return 0.0;
    const double fact_prob = 1.0 / static_cast<double>(w->choices());
    const double mean_prob = fact_prob / static_cast<double>(w->slots());
    return fact_prob + static_cast<double>(o) * mean_prob;
  }
  return std::nullopt;
}

double prob_metric(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void validate(const ExperimentConfig& cfg) {
  try {
    validate(cfg.world);
  } catch (const DomainError& e) {
    throw ConfigError("world", e.what());
  }
  if (cfg.n < 1) throw ConfigError("n", "must be at least 1");
  if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
  if (universe_size(cfg.world) <= cfg.n + 1) {
    throw ConfigError("world.universe_size", "U would be empty: |Y| must exceed n + 1");
  }
  try {
    validate(cfg.algorithm);
  } catch (const DomainError& e) {
    throw ConfigError("algorithm", e.what());
  }
  const BoundSettings& b = cfg.bound;
  if (!(b.delta > 0.0 && b.delta <= 1.0)) throw ConfigError("bound.delta", "must lie in (0,1]");
  if (b.b < 1) throw ConfigError("bound.b", "must be at least 1");
  if (!(b.epsilon >= 0.0 && b.epsilon <= 1.0)) throw ConfigError("bound.epsilon", "must lie in [0,1]");
  if (b.s && !std::isfinite(*b.s)) throw ConfigError("bound.s", "must be finite");
  if (b.r && !(*b.r >= 1.0)) throw ConfigError("bound.r", "must be at least 1");
  if (b.k_types && *b.k_types < 1) throw ConfigError("bound.k_types", "must be at least 1");
  const bool explicit_world = std::holds_alternative<ExplicitWorld>(cfg.world);
  if (explicit_world && !b.s) throw ConfigError("bound.s", "required for explicit worlds");
  if (explicit_world && !b.r) throw ConfigError("bound.r", "required for explicit worlds");
}

BoundParams resolve_bound_params(const ExperimentConfig& cfg) {
  validate(cfg);
  BoundParams p;
  p.delta = cfg.bound.delta;
  p.b = cfg.bound.b;
  p.epsilon = cfg.bound.epsilon;
  p.n = cfg.n;
  if (!cfg.bound.s || !cfg.bound.r) {
    const KnownRegularity known = known_regularity(cfg.world);
    p.s = cfg.bound.s.value_or(known.s);
    p.r = cfg.bound.r.value_or(known.r);
  } else {
    p.s = *cfg.bound.s;
    p.r = *cfg.bound.r;
  }
  if (cfg.bound.k_types) {
    p.k_types = *cfg.bound.k_types;
  } else if (const auto* m = std::get_if<MultiTypeWorld>(&cfg.world)) {
    p.k_types = m->types.size();
  }
  return p;
}

TrialState simulate_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  SeededRng rng = SeededRng::derive(cfg.seed, trial_index);
  WorldInstance world = sample_world(cfg.world, rng);
  TrainingSample sample(world.universe(), sample_iid(world.p(), cfg.n, rng));
  FactoidDist g = train(cfg.algorithm, sample, &world.p());
  return TrialState{std::move(world), std::move(sample), std::move(g)};
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  const BoundParams params = resolve_bound_params(cfg);
  const TrialState st = simulate_trial(cfg, trial_index);
  const FactoidDist& p = st.world.p();

  TrialRecord r;
  r.trial = trial_index;
  r.seed = SeededRng::derive_seed(cfg.seed, trial_index);
  r.mf = monofact_estimate(st.sample);
  r.gt = good_turing_estimate(st.sample);
  r.missing_mass = missing_mass(p, st.sample);
  r.halluc_rate = hallucination_rate(st.g, st.world);
  r.mc_exact = prob_metric(miscalibration(p, st.g, ExactValueBinning{}));
  r.mc_adaptive = prob_metric(miscalibration(p, st.g, AdaptiveBinning{params.b}));
  r.tv_fixed = prob_metric(miscalibration(p, st.g, FixedWidthBinning{params.epsilon}));
  r.mis_eps = prob_metric(generative_calibration_error(p, st.g, params.epsilon));
  r.kl = kl_divergence(p, st.g);
  r.observed_count = st.sample.observed().size();

  r.cor1 = evaluate_bound(r.halluc_rate, cor1_rhs(r.mf, r.mc_adaptive, params));
  r.corbal = evaluate_bound(r.halluc_rate, cor_balfact_rhs(r.mf, r.mc_adaptive, params));
  r.corbal_observed = evaluate_bound(
      r.halluc_rate, cor_balfact_observed_rhs(r.mf, r.mc_adaptive, r.observed_count, params));
  r.corg = evaluate_bound(r.halluc_rate, cor_general_rhs(r.mf, r.mc_adaptive, params));
  r.corfw_tv = evaluate_bound(
      r.halluc_rate, cor_fixed_width_rhs(r.mf, r.tv_fixed, params, FixedWidthVariant::tv));
  r.corfw_mis = evaluate_bound(
      r.halluc_rate, cor_fixed_width_rhs(r.mf, r.mis_eps, params, FixedWidthVariant::mis));

  r.posterior_term = posterior_term(cfg.world, st.sample);
  if (r.posterior_term) {
    r.markov_event = r.halluc_rate >= r.missing_mass - r.mc_adaptive -
                                          1.5 / params.delta * *r.posterior_term - kTol;
  }
  r.missing_mass_event = r.missing_mass >= r.mf - concentration_term(params.delta, params.n) - kTol;

  if (const auto* m = std::get_if<MultiTypeWorld>(&cfg.world)) {
    for (const TypeRange& range : type_ranges(*m)) {
      const WorldInstance world_i(project_to_type(p, range));
      const TrainingSample sample_i = project_to_type(st.sample, range);
      const FactoidDist g_i = project_to_type(st.g, range);
      TypeRecord t;
      t.mf = monofact_estimate(sample_i);
      t.missing_mass = missing_mass(world_i.p(), sample_i);
      t.halluc_rate = hallucination_rate(g_i, world_i);
      t.mc_adaptive = prob_metric(miscalibration(world_i.p(), g_i, AdaptiveBinning{params.b}));
      t.cor_types = evaluate_bound(t.halluc_rate, cor_types_rhs(t.mf, t.mc_adaptive, params));
      r.types.push_back(t);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

const BoundSummary* AggregateReport::bound(const std::string& name) const {
  for (const auto& b : bounds) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const MetricSummary* AggregateReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

AggregateReport aggregate(const ExperimentConfig& cfg, std::span<const TrialRecord> records) {
  const BoundParams params = resolve_bound_params(cfg);
  const bool multi = is_multi_type(cfg.world);
  const bool regular = !multi && params.r == 1.0;
  const double delta = params.delta;

  AggregateReport rep;
  rep.trials = records.size();

  auto add_bound = [&](const std::string& name, bool gated, double threshold, auto&& get) {
    BoundSummary b;
    b.name = name;
    b.gated = gated;
    b.threshold = threshold;
    std::size_t ok = 0;
    std::size_t vacuous = 0;
    std::size_t count = 0;
    for (const TrialRecord& r : records) {
      const std::optional<BoundEvaluation> e = get(r);
      if (!e) continue;
      ++count;
      ok += e->satisfied ? 1 : 0;
      vacuous += e->vacuous ? 1 : 0;
    }
    b.satisfied = frequency(ok, count);
    b.vacuous_fraction = count > 0 ? static_cast<double>(vacuous) / static_cast<double>(count) : 0.0;
    b.passed = count == 0 || b.satisfied.value >= threshold;
    rep.bounds.push_back(b);
  };
  auto field = [](BoundEvaluation TrialRecord::*member) {
    return [member](const TrialRecord& r) -> std::optional<BoundEvaluation> { return r.*member; };
  };
  add_bound("cor1", regular, 1.0 - delta, field(&TrialRecord::cor1));
  add_bound("corbal", !multi, 1.0 - delta, field(&TrialRecord::corbal));
  add_bound("corbal_observed", false, 1.0 - delta, field(&TrialRecord::corbal_observed));
  add_bound("corg", !multi, 1.0 - delta, field(&TrialRecord::corg));
  add_bound("corfw_tv", regular, 1.0 - delta, field(&TrialRecord::corfw_tv));
  add_bound("corfw_mis", regular, 1.0 - delta, field(&TrialRecord::corfw_mis));
  add_bound("markov_event", true, 1.0 - 2.0 * delta / 3.0,
            [](const TrialRecord& r) -> std::optional<BoundEvaluation> {
              if (!r.markov_event) return std::nullopt;
              BoundEvaluation e;
              e.satisfied = *r.markov_event;
              return e;
            });
  add_bound("missing_mass_event", true, 1.0 - delta / 3.0,
            [](const TrialRecord& r) -> std::optional<BoundEvaluation> {
              BoundEvaluation e;
              e.satisfied = r.missing_mass_event;
              return e;
            });
  const std::size_t types = records.empty() ? 0 : records.front().types.size();
  for (std::size_t i = 0; i < types; ++i) {
    add_bound("cor_types[" + std::to_string(i) + "]", true, 1.0 - delta,
              [i](const TrialRecord& r) -> std::optional<BoundEvaluation> {
                return r.types.at(i).cor_types;
              });
  }

  auto add_metric = [&](const std::string& name, auto&& get) {
    std::vector<double> xs;
    xs.reserve(records.size());
    for (const TrialRecord& r : records) xs.push_back(get(r));
    rep.metrics.push_back({name, summarize(xs)});
  };
  add_metric("mf", [](const TrialRecord& r) { return r.mf; });
  add_metric("gt", [](const TrialRecord& r) { return r.gt; });
  add_metric("missing_mass", [](const TrialRecord& r) { return r.missing_mass; });
  add_metric("halluc_rate", [](const TrialRecord& r) { return r.halluc_rate; });
  add_metric("mc_exact", [](const TrialRecord& r) { return r.mc_exact; });
  add_metric("mc_adaptive_b", [](const TrialRecord& r) { return r.mc_adaptive; });
  add_metric("tv_fixed_eps", [](const TrialRecord& r) { return r.tv_fixed; });
  add_metric("mis_eps", [](const TrialRecord& r) { return r.mis_eps; });
  add_metric("kl", [](const TrialRecord& r) { return r.kl; });
  add_metric("observed_count",
             [](const TrialRecord& r) { return static_cast<double>(r.observed_count); });

  for (const auto& b : rep.bounds) {
    if (b.gated && !b.passed) rep.passed = false;
  }
  return rep;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, Execution execution) {
  validate(cfg);
  ExperimentResult res;
  res.records = for_trials<TrialRecord>(cfg.trials, execution,
                                        [&](std::size_t i) { return run_trial(cfg, i); });
  res.aggregate = aggregate(cfg, res.records);
  return res;
}

// ---------------------------------------------------------------------------

FactoidDist project_to_type(const FactoidDist& d, const TypeRange& range) {
  if (range.first == kBottom || range.first + range.size > d.universe().size()) {
    throw DomainError("project_to_type: range outside the universe");
  }
  const FactoidUniverse u(range.size + 1);
  std::vector<Atom> atoms;
  atoms.push_back({kBottom, 0.0});
  detail::CompensatedSum bottom;
  std::size_t listed_outside = 0;
  for (const Atom& a : d.atoms()) {
    if (range.contains(a.id)) {
      atoms.push_back({a.id - range.first + 1, a.prob});
    } else {
      bottom.add(a.prob);
      ++listed_outside;
    }
  }
  const std::size_t outside = d.universe().size() - range.size;
  bottom.add(d.background() * static_cast<double>(outside - listed_outside));
  atoms.front().prob = bottom.value();
  return FactoidDist::from_weights(u, atoms, d.background());
}

TrainingSample project_to_type(const TrainingSample& s, const TypeRange& range) {
  std::vector<FactoidId> draws;
  draws.reserve(s.n());
  for (FactoidId y : s.draws()) draws.push_back(range.contains(y) ? y - range.first + 1 : kBottom);
  return TrainingSample(FactoidUniverse(range.size + 1), std::move(draws));
}

FactoidDist power_law_dist(std::size_t atoms, double exponent) {
  if (atoms < 1) throw DomainError("power_law_dist: need at least one atom");
  std::vector<Atom> w;
  w.reserve(atoms);
  for (std::size_t i = 1; i <= atoms; ++i) {
    w.push_back({static_cast<FactoidId>(i), std::pow(static_cast<double>(i), -exponent)});
  }
  return FactoidDist::from_weights(FactoidUniverse(atoms + 1), w);
}

// ---------------------------------------------------------------------------

namespace {

EventCheck make_event(std::string name, std::size_t hits, std::size_t trials, double threshold,
                      bool at_most) {
  EventCheck e;
  e.name = std::move(name);
  e.frequency = frequency(hits, trials);
  e.threshold = threshold;
  e.at_most = at_most;
  e.passed = at_most ? e.frequency.value <= threshold : e.frequency.value >= threshold;
  return e;
}

struct GtTrial {
  double mf = 0.0;
  double gt = 0.0;
  double missing = 0.0;
};

}  // namespace

ConcentrationReport run_gt_concentration(const FactoidDist& p, std::size_t n, double delta,
                                         std::size_t trials, std::uint64_t seed,
                                         Execution execution) {
  if (trials < 100) throw DomainError("run_gt_concentration: need at least 100 trials");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("run_gt_concentration: delta out of range");
  if (n < 1) throw DomainError("run_gt_concentration: n must be positive");
  const FactoidSampler sampler(p);
  const auto rows = for_trials<GtTrial>(trials, execution, [&](std::size_t i) {
    SeededRng rng = SeededRng::derive(seed, i);
    std::vector<FactoidId> draws(n);
    for (auto& y : draws) y = sampler.draw(rng);
    const TrainingSample s(p.universe(), std::move(draws));
    return GtTrial{monofact_estimate(s), good_turing_estimate(s), missing_mass(p, s)};
  });

  const double two_sided = good_turing_radius(delta, n);
  const double one_sided = concentration_term(delta, n);
  const double two_sided_loose = good_turing_radius_loose_constant(delta, n);
  const double one_sided_loose = missing_mass_lower_radius_loose_constant(delta / 3.0, n);
  std::size_t v2 = 0, v1 = 0, v2l = 0, v1l = 0;
  double gap_sum = 0.0, gap_sq = 0.0;
  for (const GtTrial& t : rows) {
    v2 += std::abs(t.mf - t.missing) > two_sided + kTol ? 1 : 0;
    v1 += t.missing < t.mf - one_sided - kTol ? 1 : 0;
    v2l += std::abs(t.mf - t.missing) > two_sided_loose + kTol ? 1 : 0;
    v1l += t.missing < t.mf - one_sided_loose - kTol ? 1 : 0;
    const double gap = t.gt - t.missing;
    gap_sum += gap;
    gap_sq += gap * gap;
  }

  ConcentrationReport rep;
  rep.trials = trials;
  rep.events.push_back(make_event("two_sided_violation", v2, trials, delta, true));
  rep.events.push_back(make_event("one_sided_violation", v1, trials, delta / 3.0, true));
  rep.events.push_back(make_event("two_sided_violation_loose_constant", v2l, trials, delta, true));
  rep.events.push_back(
      make_event("one_sided_violation_loose_constant", v1l, trials, delta / 3.0, true));

  const auto m = static_cast<double>(trials);
  SquashCheck& sq = rep.squash;
  sq.mean_gap = gap_sum / m;
  sq.stderr_ = std::sqrt(std::max(0.0, (gap_sq - m * sq.mean_gap * sq.mean_gap) / (m - 1.0)) / m);
  sq.lower = -3.0 * sq.stderr_;
  sq.upper = 1.0 / static_cast<double>(n) + 3.0 * sq.stderr_;
  sq.passed = sq.mean_gap >= sq.lower - kTol && sq.mean_gap <= sq.upper + kTol;

  rep.passed = sq.passed;
  for (const auto& e : rep.events) rep.passed = rep.passed && e.passed;
  return rep;
}

namespace {

struct UpperTrial {
  bool certain = false;
  bool calibrated = false;
};

}  // namespace

UpperBoundReport run_upper_bound_check(const WorldModel& world, std::size_t n, double delta,
                                       std::size_t trials, std::uint64_t seed,
                                       Execution execution) {
  validate(world);
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("run_upper_bound_check: delta out of range");
  if (n < 1) throw DomainError("run_upper_bound_check: n must be positive");
  const double radius = good_turing_radius(delta, n);
  const LmAlgorithm alg = LmAlgorithm::monofact_memorizer();
  const auto rows = for_trials<UpperTrial>(trials, execution, [&](std::size_t i) {
    SeededRng rng = SeededRng::derive(seed, i);
    const WorldInstance w = sample_world(world, rng);
    if (w.p().prob(kBottom) != 0.0) throw DomainError("run_upper_bound_check: p(bottom) must be 0");
    const TrainingSample s(w.universe(), sample_iid(w.p(), n, rng));
    const FactoidDist g = train(alg, s);
    const double mc = miscalibration(w.p(), g, ExactValueBinning{});
    return UpperTrial{hallucination_rate(g, w) <= monofact_estimate(s) + kTol, mc <= radius + kTol};
  });
  std::size_t certain = 0, calibrated = 0;
  for (const UpperTrial& t : rows) {
    certain += t.certain ? 1 : 0;
    calibrated += t.calibrated ? 1 : 0;
  }
  UpperBoundReport rep;
  rep.trials = trials;
  rep.events.push_back(make_event("halluc_at_most_mf", certain, trials, 1.0, false));
  rep.events.push_back(make_event("mc_inf_within_radius", calibrated, trials, 1.0 - delta, false));
  rep.passed = trials > 0 && rep.events[0].passed && rep.events[1].passed;
  return rep;
}

// ---------------------------------------------------------------------------

TheoremMainReport run_theorem_main(const PermutedPowerLaw& model, std::size_t n,
                                   std::size_t probes, std::size_t posterior_samples,
                                   std::uint64_t seed) {
  validate(WorldModel{model});
  if (model.exponent != 0.0) throw UnsupportedModel("run_theorem_main: needs exponent 0");
  SeededRng rng = SeededRng::derive(seed, 0);
  const WorldInstance world = sample_world(model, rng);
  const TrainingSample sample(world.universe(), sample_iid(world.p(), n, rng));
  const FactoidSet& observed = sample.observed();

  TheoremMainReport rep;
  rep.observed_facts = observed.size() - 1;
  rep.closed_form = uniform_posterior_terms(model.universe_size, model.fact_count, rep.observed_facts);
  SeededRng marg_rng = SeededRng::derive(seed, 1);
  rep.marginals = estimate_posterior_marginals(model, observed, posterior_samples, marg_rng);
  // Every y in U has the same marginal, so the estimated maximum sits
  // slightly above the closed form; allow 3 sigma below and the max of |U|
  // noisy estimates above.
  const auto u = static_cast<double>(model.universe_size - observed.size());
  const double spread = 3.0 + std::sqrt(2.0 * std::log(std::max(2.0, u)));
  auto within = [&](double estimate, double stderr_, double exact) {
    const double sigma = std::max(stderr_, 1e-12);
    return estimate >= exact - 3.0 * sigma && estimate <= exact + spread * sigma;
  };
  rep.marginals_agree = within(rep.marginals.max_fact_freq, rep.marginals.max_fact_stderr,
                               rep.closed_form.max_fact_prob) &&
                        within(rep.marginals.max_mean_prob, rep.marginals.max_mean_stderr,
                               rep.closed_form.max_mean_prob);

  const FactoidUniverse universe = world.universe();
  std::vector<std::pair<std::string, FactoidDist>> models;
  models.emplace_back("empirical", train(LmAlgorithm::empirical(), sample));
  models.emplace_back("laplace", train(LmAlgorithm::laplace(0.5), sample));
  models.emplace_back("uniform", train(LmAlgorithm::uniform(), sample));
  models.emplace_back("monofact_memorizer", train(LmAlgorithm::monofact_memorizer(), sample));
  models.emplace_back("yay_mixture",
                      train(LmAlgorithm::yay_mixture(LmAlgorithm::empirical(), 0.99), sample));
  {
    SeededRng grng = SeededRng::derive(seed, 2);
    std::vector<double> w(universe.size());
    for (double& x : w) x = grng.uniform01();
    models.emplace_back("random", FactoidDist::from_dense(universe, w));
  }
  struct PartitionKind {
    std::string label;
    BinningSpec spec;
    int special;  // 0: binning, 1: singletons, 2: whole
  };
  const std::vector<PartitionKind> kinds = {
      {"exact", ExactValueBinning{}, 0},           {"adaptive_b1", AdaptiveBinning{1}, 0},
      {"adaptive_b3", AdaptiveBinning{3}, 0},       {"adaptive_b10", AdaptiveBinning{10}, 0},
      {"fixed_eps0.1", FixedWidthBinning{0.1}, 0}, {"fixed_eps0.5", FixedWidthBinning{0.5}, 0},
      {"singletons", ExactValueBinning{}, 1},      {"whole", ExactValueBinning{}, 2},
  };
  if (probes > models.size() * kinds.size()) {
    throw DomainError("run_theorem_main: at most 48 distinct probes");
  }
  // (i mod 6, i mod 8) is distinct for i below lcm(6, 8) = 24; past that,
  // step the partition index to keep pairs distinct.
  for (std::size_t i = 0; i < probes; ++i) {
    const std::size_t gi = i % models.size();
    const std::size_t pk = (i % kinds.size() + i / 24) % kinds.size();
    const auto& [gname, g] = models[gi];
    const PartitionKind& kind = kinds[pk];
    const Partition pi = kind.special == 1   ? Partition::singletons(universe)
                         : kind.special == 2 ? Partition::whole(universe)
                                             : binning_partition(g, kind.spec);
    SeededRng prng = SeededRng::derive(seed, 100 + i);
    TheoremProbe probe{gname + "/" + kind.label,
                       verify_theorem_main_mc(model, observed, g, pi, posterior_samples, prng)};
    rep.passed = rep.passed && probe.result.passed;
    rep.probes.push_back(std::move(probe));
  }
  rep.passed = rep.passed && rep.marginals_agree;
  return rep;
}

ExplicitWorld random_explicit_world(std::size_t size, std::size_t instances, SeededRng& rng) {
  if (size < 2) throw DomainError("random_explicit_world: universe needs a non-bottom factoid");
  if (instances < 1) throw DomainError("random_explicit_world: need an instance");
  const FactoidUniverse universe(size);
  ExplicitWorld w;
  double total = 0.0;
  std::vector<double> prior(instances);
  for (double& x : prior) total += (x = 0.05 + rng.uniform01());
  for (std::size_t j = 0; j < instances; ++j) {
    std::vector<Atom> atoms;
    while (atoms.empty()) {
      for (FactoidId y = 1; y < size; ++y) {
        if (rng.below(2) == 1) atoms.push_back({y, 0.05 + rng.uniform01()});
      }
    }
    w.instances.emplace_back(prior[j] / total,
                             WorldInstance(FactoidDist::from_weights(universe, atoms)));
  }
  return w;
}

BruteForceReport run_brute_force(std::size_t max_universe, std::size_t priors_per_size,
                                 std::uint64_t seed, Execution execution) {
  if (max_universe < 2 || max_universe > 6) {
    throw DomainError("run_brute_force: max universe must lie in [2, 6]");
  }
  BruteForceReport rep;
  SeededRng rng = SeededRng::derive(seed, 0);
  for (std::size_t size = 2; size <= max_universe; ++size) {
    for (std::size_t k = 0; k < priors_per_size; ++k) {
      const ExplicitWorld prior = random_explicit_world(size, 10, rng);
      const LemmaSweep sweep = verify_lemma_meat_exhaustive(prior, 1e-9, execution);
      ++rep.priors;
      rep.partitions += sweep.partitions;
      rep.subsets += sweep.partitions * sweep.subsets;
      rep.lemma_violations += sweep.violations.size();

      const FactoidUniverse universe(size);
      std::vector<double> a(size), b(size);
      for (double& x : a) x = rng.below(3) == 0 ? 0.0 : rng.uniform01();
      for (double& x : b) x = rng.below(3) == 0 ? 0.0 : rng.uniform01();
      a[0] += 1e-3;
      b[size - 1] += 1e-3;
      const FactoidDist d1 = FactoidDist::from_dense(universe, a);
      const FactoidDist d2 = FactoidDist::from_dense(universe, b);
      const auto p1 = d1.dense();
      const auto p2 = d2.dense();
      double best = 0.0;
      for (std::uint32_t mask = 0; mask < (1u << size); ++mask) {
        double diff = 0.0;
        for (std::size_t y = 0; y < size; ++y) {
          if (mask >> y & 1u) diff += p1[y] - p2[y];
        }
        best = std::max(best, diff);
      }
      const TvForms f = tv_forms(d1, d2);
      ++rep.tv_pairs;
      const bool agree = std::abs(best - f.max_over_subsets) <= kTol &&
                         std::abs(best - f.half_l1) <= kTol &&
                         std::abs(best - f.positive_part) <= kTol;
      if (!agree) ++rep.tv_mismatches;
    }
  }
  rep.passed = rep.lemma_violations == 0 && rep.tv_mismatches == 0;
  return rep;
}

}  // namespace monofact
