#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "monofact/cli_io.hpp"
#include "monofact/error.hpp"

namespace monofact {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Stream index of the single world drawn by gt-check; distinct from the
// per-trial streams 0..M-1.
constexpr std::uint64_t kGtWorldStream = ~std::uint64_t{0};

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void print_frequency_row(std::ostream& out, const std::string& name, const Frequency& f) {
  out << "  " << name << ": " << f.successes << "/" << f.trials << " = "
      << format_number(f.value) << "  [95% CI " << format_number(f.ci.lo) << ", "
      << format_number(f.ci.hi) << "]";
}

void print_aggregate(std::ostream& out, const AggregateReport& a) {
  out << "trials: " << a.trials << "\n";
  out << "bounds (satisfaction frequency, threshold, vacuous fraction):\n";
  for (const auto& b : a.bounds) {
    print_frequency_row(out, b.name, b.satisfied);
    out << "  threshold " << format_number(b.threshold) << "  vacuous "
        << format_number(b.vacuous_fraction) << "  "
        << (b.gated ? verdict(b.passed) : "diagnostic") << "\n";
  }
  out << "metrics (mean, stddev, finite count):\n";
  for (const auto& m : a.metrics) {
    out << "  " << m.name << ": " << format_number(m.summary.mean) << "  "
        << format_number(m.summary.stddev) << "  " << m.summary.count << "\n";
  }
  out << "overall: " << verdict(a.passed) << "\n";
}

void print_events(std::ostream& out, const std::vector<EventCheck>& events) {
  for (const auto& e : events) {
    print_frequency_row(out, e.name, e.frequency);
    out << "  " << (e.at_most ? "<= " : ">= ") << format_number(e.threshold) << "  "
        << verdict(e.passed) << "\n";
  }
}

void apply_threads(int threads) {
  if (threads > 0) {
    set_threads(threads);
    return;
  }
  if (const char* env = std::getenv("MONOFACT_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) set_threads(t);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, bool serial) {
  ExperimentConfig cfg = parse_config(config_path);
  if (seed) cfg.seed = *seed;
  const std::filesystem::path dir =
      out_dir.empty() ? std::filesystem::path("monofact-run") : std::filesystem::path(out_dir);
  RunManifest manifest = begin_run(dir, cfg);
  const ExperimentResult result =
      run_experiment(cfg, serial ? Execution::serial : Execution::parallel);
  write_results(dir, manifest, cfg, result);
  print_aggregate(std::cout, result.aggregate);
  std::cout << "results written to " << dir.string() << "\n";
  return result.aggregate.passed ? kExitPass : kExitFail;
}

int cmd_gt_check(const std::string& config_path, bool serial) {
  const ExperimentConfig cfg = parse_config(config_path);
  SeededRng rng = SeededRng::derive(cfg.seed, kGtWorldStream);
  const WorldInstance world = sample_world(cfg.world, rng);
  const ConcentrationReport rep =
      run_gt_concentration(world.p(), cfg.n, cfg.bound.delta, cfg.trials, cfg.seed,
                           serial ? Execution::serial : Execution::parallel);
  std::cout << "Good-Turing concentration, n = " << cfg.n << ", delta = "
            << format_number(cfg.bound.delta) << ", trials = " << rep.trials << "\n";
  std::cout << "violation frequencies:\n";
  print_events(std::cout, rep.events);
  const SquashCheck& sq = rep.squash;
  std::cout << "  mean(GT) - mean(missing mass) = " << format_number(sq.mean_gap) << " (SE "
            << format_number(sq.stderr_) << ") in [" << format_number(sq.lower) << ", "
            << format_number(sq.upper) << "]  " << verdict(sq.passed) << "\n";
  std::cout << "overall: " << verdict(rep.passed) << "\n";
  return rep.passed ? kExitPass : kExitFail;
}

int cmd_upper_bound(const std::string& config_path, bool serial) {
  const ExperimentConfig cfg = parse_config(config_path);
  const UpperBoundReport rep =
      run_upper_bound_check(cfg.world, cfg.n, cfg.bound.delta, cfg.trials, cfg.seed,
                            serial ? Execution::serial : Execution::parallel);
  std::cout << "monofact memorizer, n = " << cfg.n << ", delta = "
            << format_number(cfg.bound.delta) << ", radius "
            << format_number(good_turing_radius(cfg.bound.delta, cfg.n)) << "\n";
  print_events(std::cout, rep.events);
  std::cout << "overall: " << verdict(rep.passed) << "\n";
  return rep.passed ? kExitPass : kExitFail;
}

int cmd_brute_force(std::size_t max_universe, std::size_t priors, std::uint64_t seed,
                    bool serial) {
  const BruteForceReport rep = run_brute_force(
      max_universe, priors, seed, serial ? Execution::serial : Execution::parallel);
  std::cout << "universes 2.." << max_universe << ": " << rep.priors << " priors, "
            << rep.partitions << " partitions, " << rep.subsets << " (partition, subset) pairs\n";
  std::cout << "lemma sweep: " << rep.lemma_violations << " violations\n";
  std::cout << "total variation forms: " << rep.tv_pairs << " pairs, " << rep.tv_mismatches
            << " mismatches\n";
  std::cout << (rep.passed ? "0 violations" : "violations found") << "\n";
  return rep.passed ? kExitPass : kExitFail;
}

int cmd_thm_main(const std::string& config_path, std::size_t probes, std::size_t samples) {
  const ExperimentConfig cfg = parse_config(config_path);
  const auto* model = std::get_if<PermutedPowerLaw>(&cfg.world);
  if (!model || model->exponent != 0.0) {
    throw ConfigError("world.kind", "thm-main needs permuted_power_law with exponent 0");
  }
  const TheoremMainReport rep = run_theorem_main(*model, cfg.n, probes, samples, cfg.seed);
  std::cout << "observed facts m = " << rep.observed_facts << "\n";
  std::cout << "closed form: max Pr[y in F] = " << format_number(rep.closed_form.max_fact_prob)
            << ", max E[p(y)] = " << format_number(rep.closed_form.max_mean_prob)
            << ", rhs = " << format_number(rep.closed_form.rhs) << "\n";
  std::cout << "estimated: max Pr[y in F] = " << format_number(rep.marginals.max_fact_freq)
            << " (SE " << format_number(rep.marginals.max_fact_stderr)
            << "), max E[p(y)] = " << format_number(rep.marginals.max_mean_prob) << " (SE "
            << format_number(rep.marginals.max_mean_stderr) << ")  "
            << verdict(rep.marginals_agree) << "\n";
  for (const auto& p : rep.probes) {
    std::cout << "  " << p.label << ": lhs " << format_number(p.result.lhs_mean) << " (SE "
              << format_number(p.result.lhs_stderr) << ") <= " << format_number(p.result.rhs_exact)
              << "  " << verdict(p.result.passed) << "\n";
  }
  std::cout << "overall: " << verdict(rep.passed) << "\n";
  return rep.passed ? kExitPass : kExitFail;
}

int cmd_report(const std::string& run_dir) {
  const std::filesystem::path dir(run_dir);
  const RunManifest manifest = manifest_from_json(read_file(dir / "manifest.json"));
  const bool hash_ok = sha256_hex(read_file(dir / "config.txt")) == manifest.config_hash;
  bool outputs_ok = manifest.status == "complete";
  for (const auto& [file, hash] : manifest.output_hashes) {
    if (sha256_hex(read_file(dir / file)) != hash) {
      std::cout << "hash mismatch: " << file << "\n";
      outputs_ok = false;
    }
  }
  const AggregateReport a = aggregate_from_json(read_file(dir / "aggregate.json"));
  std::cout << "run " << dir.string() << " (version " << manifest.version << ", seed "
            << manifest.seed << ", " << manifest.timestamp << ")\n";
  std::cout << "config hash " << verdict(hash_ok) << ", outputs " << verdict(outputs_ok) << "\n";
  print_aggregate(std::cout, a);
  std::cout << "reliability curve (trial 0):\n" << read_file(dir / "reliability.csv");
  return a.passed && hash_ok && outputs_ok ? kExitPass : kExitFail;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"monofact: hallucination lower-bound simulation lab"};
  app.require_subcommand(1);
  int threads = 0;
  bool serial = false;
  app.add_option("--threads", threads, "worker threads (default: MONOFACT_THREADS or all)");
  app.add_flag("--serial", serial, "use the serial reference loops");

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_value = 0;
  std::size_t max_universe = 5;
  std::size_t priors = 4;
  std::size_t probes = 20;
  std::size_t posterior_samples = 2000;
  std::string run_dir;

  auto* run = app.add_subcommand("run", "run a full experiment");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--seed", seed_value, "override the config seed");
  run->add_option("--threads", threads, "worker threads");

  auto* gt = app.add_subcommand("gt-check", "Good-Turing concentration suite");
  gt->add_option("config", config_path, "config file")->required();
  gt->add_option("--threads", threads, "worker threads");

  auto* upper = app.add_subcommand("upper-bound", "memorizer upper-bound suite");
  upper->add_option("config", config_path, "config file")->required();
  upper->add_option("--threads", threads, "worker threads");

  auto* brute = app.add_subcommand("brute-force", "exhaustive lemma and TV sweeps");
  brute->add_option("--max-universe", max_universe, "largest universe (2..6)");
  brute->add_option("--priors", priors, "random priors per universe size");
  brute->add_option("--seed", seed_value, "seed");
  brute->add_option("--threads", threads, "worker threads");

  auto* thm = app.add_subcommand("thm-main", "posterior Monte Carlo of the main theorem");
  thm->add_option("config", config_path, "config file")->required();
  thm->add_option("--probes", probes, "distinct (g, partition) probes");
  thm->add_option("--posterior-samples", posterior_samples, "posterior draws per probe");

  auto* report = app.add_subcommand("report", "render a finished run directory");
  report->add_option("run-dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    apply_threads(threads);
    if (*run) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_run(config_path, out_dir, seed, serial);
    }
    if (*gt) return cmd_gt_check(config_path, serial);
    if (*upper) return cmd_upper_bound(config_path, serial);
    if (*brute) return cmd_brute_force(max_universe, priors, seed_value, serial);
    if (*thm) return cmd_thm_main(config_path, probes, posterior_samples);
    if (*report) return cmd_report(run_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cerr << app.help();
  return kExitUsage;
}

}  // namespace monofact
