#include <cmath>
#include <sstream>

#include "doctest.h"
#include "monofact/cli_io.hpp"
#include "monofact/error.hpp"
#include "monofact/harness.hpp"

using namespace monofact;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.world = PermutedPowerLaw{20'000, 50, 0.0};
  cfg.n = 100;
  cfg.algorithm = LmAlgorithm::monofact_memorizer();
  cfg.trials = 40;
  cfg.seed = 5;
  return cfg;
}

std::string csv_of(std::span<const TrialRecord> records, std::size_t types = 0) {
  std::ostringstream out;
  write_trials_csv(out, records, types);
  return out.str();
}

std::string config_error_key(const ExperimentConfig& cfg) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config validation names the offending key") {
  ExperimentConfig cfg = small_config();
  CHECK(config_error_key(cfg).empty());
  cfg.n = 19'999;
  CHECK(config_error_key(cfg) == "world.universe_size");
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("U would be empty") != std::string::npos);
  }
  cfg = small_config();
  cfg.trials = 0;
  CHECK(config_error_key(cfg) == "trials");
  cfg = small_config();
  cfg.bound.delta = 2.0;
  CHECK(config_error_key(cfg) == "bound.delta");
  cfg = small_config();
  cfg.bound.r = 0.5;
  CHECK(config_error_key(cfg) == "bound.r");
  cfg = small_config();
  cfg.algorithm = LmAlgorithm::laplace(-1.0);
  CHECK(config_error_key(cfg) == "algorithm");
  cfg = small_config();
  cfg.world = PermutedPowerLaw{20'000, 20'000, 0.0};
  CHECK(config_error_key(cfg) == "world");

  cfg = small_config();
  const FactoidUniverse u(400);
  const FactoidId f[] = {1, 2};
  ExplicitWorld w;
  w.instances.emplace_back(1.0, WorldInstance(FactoidDist::uniform_over(u, f)));
  cfg.world = w;
  CHECK(config_error_key(cfg) == "bound.s");
  cfg.bound.s = 5.0;
  CHECK(config_error_key(cfg) == "bound.r");
  cfg.bound.r = 1.0;
  CHECK(config_error_key(cfg).empty());
}

TEST_CASE("bound parameters are derived from the world") {
  ExperimentConfig cfg = small_config();
  BoundParams p = resolve_bound_params(cfg);
  CHECK(p.r == 1.0);
  CHECK(p.s == doctest::Approx(std::log((20'000.0 - 51.0) / 51.0)));
  CHECK(p.n == 100);
  CHECK(p.k_types == 1);
  cfg.bound.s = 3.0;
  CHECK(resolve_bound_params(cfg).s == 3.0);
  cfg.world = W5World{3, 3, 3, 3};
  cfg.n = 5;
  p = resolve_bound_params(cfg);
  CHECK(p.r == 9.0);
  cfg.world = MultiTypeWorld{{{1000, 10, 0.0, 0.5}, {2000, 10, 0.0, 0.5}}};
  CHECK(resolve_bound_params(cfg).k_types == 2);
}

TEST_CASE("trials are deterministic and order independent") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult serial = run_experiment(cfg, Execution::serial);
  const ExperimentResult parallel = run_experiment(cfg, Execution::parallel);
  REQUIRE(serial.records.size() == 40);
  CHECK(csv_of(serial.records) == csv_of(parallel.records));
  CHECK(aggregate_to_json(serial.aggregate) == aggregate_to_json(parallel.aggregate));
  // Any single trial can be recomputed alone.
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{39}}) {
    const TrialRecord r = run_trial(cfg, i);
    CHECK(csv_of(std::span(&r, 1)) == csv_of(std::span(&serial.records[i], 1)));
    CHECK(r.seed == SeededRng::derive_seed(cfg.seed, i));
  }
  ExperimentConfig other = cfg;
  other.seed = 6;
  CHECK(csv_of(run_experiment(other).records) != csv_of(serial.records));
}

TEST_CASE("record examples") {
  ExperimentConfig cfg = small_config();
  cfg.algorithm = LmAlgorithm::oracle();
  for (std::size_t i = 0; i < 5; ++i) {
    const TrialRecord r = run_trial(cfg, i);
    CHECK(r.halluc_rate == 0.0);
    CHECK(r.mc_exact == 0.0);
    CHECK(r.kl == doctest::Approx(0.0));
  }
  cfg.algorithm = LmAlgorithm::monofact_memorizer();
  cfg.world = PermutedPowerLaw{20'000, 300, 1.0};
  for (std::size_t i = 0; i < 20; ++i) {
    const TrialRecord r = run_trial(cfg, i);
    CHECK(r.halluc_rate <= r.mf + 1e-15);
    CHECK(r.mf >= 0.0);
    CHECK(r.observed_count >= 2);
    CHECK(r.gt - r.mf <= 1.0 / 100.0 + 1e-15);
  }
}

TEST_CASE("a single trial aggregates to itself") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 1;
  const ExperimentResult res = run_experiment(cfg);
  const TrialRecord& r = res.records.front();
  CHECK(res.aggregate.trials == 1);
  CHECK(res.aggregate.metric("mf")->summary.mean == r.mf);
  CHECK(res.aggregate.metric("halluc_rate")->summary.mean == r.halluc_rate);
  CHECK(res.aggregate.metric("mc_adaptive_b")->summary.mean == r.mc_adaptive);
  CHECK(res.aggregate.bound("cor1")->satisfied.value == (r.cor1.satisfied ? 1.0 : 0.0));
  CHECK(res.aggregate.bound("cor1")->vacuous_fraction == (r.cor1.vacuous ? 1.0 : 0.0));
  CHECK(res.aggregate.bound("nonexistent") == nullptr);
}

TEST_CASE("zero sparsity makes every bound vacuous") {
  ExperimentConfig cfg = small_config();
  cfg.bound.s = 0.0;
  cfg.trials = 20;
  const AggregateReport a = run_experiment(cfg).aggregate;
  for (const char* name : {"cor1", "corbal", "corg", "corfw_tv", "corfw_mis"}) {
    CHECK(a.bound(name)->vacuous_fraction == 1.0);
    CHECK(a.bound(name)->satisfied.value == 1.0);
  }
}

TEST_CASE("gating follows the world's regularity") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 5;
  AggregateReport a = run_experiment(cfg).aggregate;
  CHECK(a.bound("cor1")->gated);
  CHECK(a.bound("corbal")->gated);
  CHECK_FALSE(a.bound("corbal_observed")->gated);
  CHECK(a.bound("markov_event")->gated);

  cfg.world = W5World{3, 3, 3, 3};
  cfg.n = 5;
  a = run_experiment(cfg).aggregate;
  CHECK_FALSE(a.bound("cor1")->gated);
  CHECK(a.bound("corg")->gated);

  cfg.world = MultiTypeWorld{{{5000, 50, 0.0, 0.5}, {5000, 50, 0.0, 0.5}}};
  cfg.n = 100;
  const ExperimentResult mt = run_experiment(cfg);
  a = mt.aggregate;
  CHECK_FALSE(a.bound("cor1")->gated);
  CHECK_FALSE(a.bound("corg")->gated);
  REQUIRE(a.bound("cor_types[1]") != nullptr);
  CHECK(a.bound("cor_types[0]")->gated);
  CHECK(mt.records.front().types.size() == 2);
  CHECK(a.bound("markov_event")->satisfied.trials == 0);
}

TEST_CASE("uniform-world corollary holds in at least 1 - delta of trials") {
  ExperimentConfig cfg;
  cfg.world = PermutedPowerLaw{10'000'000, 1000, 0.0};
  cfg.n = 2000;
  cfg.algorithm = LmAlgorithm::monofact_memorizer();
  cfg.trials = 200;
  cfg.seed = 3;
  const AggregateReport a = run_experiment(cfg).aggregate;
  CHECK(a.bound("cor1")->satisfied.value >= 0.9);
  CHECK(a.bound("cor1")->vacuous_fraction < 1.0);
  CHECK(a.bound("missing_mass_event")->passed);
  CHECK(a.bound("markov_event")->passed);
  CHECK(a.passed);
}

TEST_CASE("projection to a fact type") {
  const FactoidUniverse u(11);
  const FactoidDist d = dist_from_weights(u, {{0, 0.1}, {2, 0.2}, {5, 0.3}, {9, 0.4}});
  const TypeRange range{4, 5};  // ids 4..8
  const FactoidDist di = project_to_type(d, range);
  CHECK(di.universe().size() == 6);
  CHECK(di(kBottom) == doctest::Approx(0.7));
  CHECK(di(2) == doctest::Approx(0.3));
  const TrainingSample s(u, {2, 5, 5, 8, 0});
  const TrainingSample si = project_to_type(s, range);
  CHECK(si.n() == 5);
  CHECK(si.count_of(kBottom) == 2);
  CHECK(si.count_of(2) == 2);
  CHECK(si.count_of(5) == 1);
}

TEST_CASE("power law distribution") {
  const FactoidDist p = power_law_dist(4, 1.0);
  CHECK(p.universe().size() == 5);
  CHECK(p(kBottom) == 0.0);
  const double z = 1 + 0.5 + 1.0 / 3 + 0.25;
  CHECK(p(1) == doctest::Approx(1 / z));
  CHECK(p(4) == doctest::Approx(0.25 / z));
}

TEST_CASE("Good-Turing concentration suite") {
  const ConcentrationReport uni = run_gt_concentration(power_law_dist(200, 0.0), 1000, 0.2, 200, 1);
  CHECK(uni.passed);
  for (const auto& e : uni.events) CHECK(e.frequency.value == 0.0);
  CHECK(uni.squash.passed);

  const FactoidDist point = dist_from_weights(FactoidUniverse(3), {{1, 1.0}});
  const ConcentrationReport pm = run_gt_concentration(point, 50, 0.1, 100, 2);
  CHECK(pm.passed);
  for (const auto& e : pm.events) CHECK(e.frequency.successes == 0);
  CHECK(pm.squash.mean_gap == 0.0);

  CHECK_THROWS_AS(run_gt_concentration(point, 50, 0.1, 99, 2), DomainError);

  const FactoidDist zipf = power_law_dist(10'000, 1.0);
  const ConcentrationReport a = run_gt_concentration(zipf, 1000, 0.1, 100, 3, Execution::serial);
  const ConcentrationReport b = run_gt_concentration(zipf, 1000, 0.1, 100, 3, Execution::parallel);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].frequency.successes == b.events[i].frequency.successes);
  }
  CHECK(a.squash.mean_gap == b.squash.mean_gap);
}

TEST_CASE("upper bound suite") {
  const UpperBoundReport rep =
      run_upper_bound_check(PermutedPowerLaw{100'000, 500, 1.0}, 1000, 0.1, 100, 4);
  REQUIRE(rep.events.size() == 2);
  CHECK(rep.events[0].frequency.value == 1.0);
  CHECK(rep.events[1].frequency.value >= 0.9);
  CHECK(rep.passed);
}

TEST_CASE("theorem main report") {
  const TheoremMainReport rep = run_theorem_main(PermutedPowerLaw{51, 20, 0.0}, 30, 8, 500, 9);
  CHECK(rep.probes.size() == 8);
  CHECK(rep.closed_form.rhs ==
        doctest::Approx(uniform_posterior_terms(51, 20, rep.observed_facts).rhs));
  CHECK(rep.marginals_agree);
  CHECK(rep.passed);
  for (const auto& p : rep.probes) CHECK(p.result.lhs_mean <= p.result.rhs_exact + 3 * p.result.lhs_stderr);
}

TEST_CASE("brute force report") {
  const BruteForceReport s = run_brute_force(4, 2, 10, Execution::serial);
  const BruteForceReport p = run_brute_force(4, 2, 10, Execution::parallel);
  CHECK(s.passed);
  CHECK(s.lemma_violations == 0);
  CHECK(s.tv_mismatches == 0);
  CHECK(s.priors == 6);
  CHECK(s.partitions == p.partitions);
  CHECK(s.tv_pairs == p.tv_pairs);
  CHECK_THROWS_AS(run_brute_force(7, 1, 0), DomainError);
}

TEST_CASE("trial errors carry the trial index") {
  const TrialError e(12, "boom");
  CHECK(e.trial() == 12);
  CHECK(std::string(e.what()) == "trial 12: boom");
}

}  // TEST_SUITE
