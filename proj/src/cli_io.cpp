#include "monofact/cli_io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "monofact/error.hpp"

namespace monofact {

using json = nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class KeyValues {
 public:
  explicit KeyValues(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const std::string& raw(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key, "missing required key");
    it->second.used = true;
    return it->second.value;
  }

  std::uint64_t u64(const std::string& key) {
    const std::string& v = raw(key);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
      throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
    return x;
  }

  std::size_t size(const std::string& key) { return static_cast<std::size_t>(u64(key)); }

  double real(const std::string& key) {
    const std::string& v = raw(key);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
      throw ConfigError(key, "expected a number, got '" + v + "'");
    }
    return x;
  }

  void reject_unused(const std::string& context) const {
    for (const auto& [key, e] : entries_) {
      if (!e.used) throw ConfigError(key, "not used " + context);
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

bool is_known_key(const std::string& key) {
  static const std::set<std::string> fixed = {
      "world.kind",      "world.universe_size", "world.fact_count", "world.exponent",
      "world.people",    "world.dates",         "world.foods",      "world.locations",
      "world.types",     "n",                   "algorithm.kind",   "algorithm.alpha",
      "algorithm.lambda", "algorithm.base",     "bound.delta",      "bound.b",
      "bound.epsilon",   "bound.s",             "bound.r",          "bound.k_types",
      "trials",          "seed"};
  if (fixed.count(key)) return true;
  const std::string prefix = "world.type.";
  if (key.rfind(prefix, 0) != 0) return false;
  const std::string rest = key.substr(prefix.size());
  const auto dot = rest.find('.');
  if (dot == std::string::npos || dot == 0) return false;
  const std::string index = rest.substr(0, dot);
  if (index.find_first_not_of("0123456789") != std::string::npos) return false;
  static const std::set<std::string> fields = {"range_size", "fact_count", "exponent", "weight"};
  return fields.count(rest.substr(dot + 1)) > 0;
}

LmAlgorithm::Kind parse_algorithm_kind(KeyValues& kv, const std::string& key) {
  const std::string& v = kv.raw(key);
  const auto kind = parse_kind(v);
  if (!kind) throw ConfigError(key, "unknown algorithm '" + v + "'");
  return *kind;
}

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string exact(double x) { return fmt("%.17g", x); }

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (!is_known_key(key)) throw ConfigError(key, "unknown key");
    if (entries.count(key)) throw ConfigError(key, "duplicate key");
    entries[key] = Entry{value, line_no, false};
  }

  KeyValues kv(std::move(entries));
  ExperimentConfig cfg;
  const std::string kind = kv.raw("world.kind");
  if (kind == "permuted_power_law") {
    cfg.world = PermutedPowerLaw{kv.size("world.universe_size"), kv.size("world.fact_count"),
                                 kv.real("world.exponent")};
  } else if (kind == "w5") {
    cfg.world = W5World{kv.size("world.people"), kv.size("world.dates"), kv.size("world.foods"),
                        kv.size("world.locations")};
  } else if (kind == "multi_type") {
    MultiTypeWorld m;
    const std::size_t types = kv.size("world.types");
    if (types < 1) throw ConfigError("world.types", "must be at least 1");
    for (std::size_t i = 0; i < types; ++i) {
      const std::string p = "world.type." + std::to_string(i) + ".";
      m.types.push_back({kv.size(p + "range_size"), kv.size(p + "fact_count"),
                         kv.real(p + "exponent"), kv.real(p + "weight")});
    }
    cfg.world = m;
  } else {
    throw ConfigError("world.kind", "unknown world '" + kind +
                                        "' (expected permuted_power_law, w5 or multi_type)");
  }
  try {
    validate(cfg.world);
  } catch (const DomainError& e) {
    throw ConfigError("world", e.what());
  }

  cfg.n = kv.size("n");
  const LmAlgorithm::Kind alg = parse_algorithm_kind(kv, "algorithm.kind");
  auto simple = [&](LmAlgorithm::Kind k) {
    LmAlgorithm a = LmAlgorithm::of(k);
    if (k == LmAlgorithm::Kind::laplace) a.alpha = kv.real("algorithm.alpha");
    return a;
  };
  if (alg == LmAlgorithm::Kind::yay_mixture) {
    const LmAlgorithm::Kind base = parse_algorithm_kind(kv, "algorithm.base");
    if (base == LmAlgorithm::Kind::yay_mixture) {
      throw ConfigError("algorithm.base", "yay_mixture cannot wrap itself");
    }
    cfg.algorithm = LmAlgorithm::yay_mixture(simple(base), kv.real("algorithm.lambda"));
  } else {
    cfg.algorithm = simple(alg);
  }

  if (kv.has("bound.delta")) cfg.bound.delta = kv.real("bound.delta");
  if (kv.has("bound.b")) cfg.bound.b = kv.size("bound.b");
  if (kv.has("bound.epsilon")) cfg.bound.epsilon = kv.real("bound.epsilon");
  if (kv.has("bound.s")) cfg.bound.s = kv.real("bound.s");
  if (kv.has("bound.r")) cfg.bound.r = kv.real("bound.r");
  if (kv.has("bound.k_types")) cfg.bound.k_types = kv.size("bound.k_types");
  cfg.trials = kv.size("trials");
  cfg.seed = kv.u64("seed");

  kv.reject_unused("with world.kind = " + kind + " and algorithm.kind = " +
                   kind_name(cfg.algorithm.kind));
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("", e.what());
  }
  return parse_config_text(text);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "n = " << cfg.n << "\ntrials = " << cfg.trials << "\nseed = " << cfg.seed << "\n";
  out << "\n[world]\n";
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PermutedPowerLaw>) {
          out << "kind = permuted_power_law\n"
              << "universe_size = " << m.universe_size << "\n"
              << "fact_count = " << m.fact_count << "\n"
              << "exponent = " << exact(m.exponent) << "\n";
        } else if constexpr (std::is_same_v<T, W5World>) {
          out << "kind = w5\n"
              << "people = " << m.people << "\ndates = " << m.dates << "\nfoods = " << m.foods
              << "\nlocations = " << m.locations << "\n";
        } else if constexpr (std::is_same_v<T, MultiTypeWorld>) {
          out << "kind = multi_type\ntypes = " << m.types.size() << "\n";
          for (std::size_t i = 0; i < m.types.size(); ++i) {
            const auto& t = m.types[i];
            const std::string p = "type." + std::to_string(i) + ".";
            out << p << "range_size = " << t.range_size << "\n"
                << p << "fact_count = " << t.fact_count << "\n"
                << p << "exponent = " << exact(t.exponent) << "\n"
                << p << "weight = " << exact(t.weight) << "\n";
          }
        } else {
          throw UnsupportedModel("serialize_config: explicit worlds have no text form");
        }
      },
      cfg.world);

  out << "\n[algorithm]\n";
  const LmAlgorithm& a = cfg.algorithm;
  out << "kind = " << kind_name(a.kind) << "\n";
  const LmAlgorithm& inner = a.kind == LmAlgorithm::Kind::yay_mixture ? *a.base : a;
  if (a.kind == LmAlgorithm::Kind::yay_mixture) {
    out << "base = " << kind_name(inner.kind) << "\n"
        << "lambda = " << exact(a.lambda) << "\n";
  }
  if (inner.kind == LmAlgorithm::Kind::laplace) out << "alpha = " << exact(inner.alpha) << "\n";

  out << "\n[bound]\n"
      << "delta = " << exact(cfg.bound.delta) << "\n"
      << "b = " << cfg.bound.b << "\n"
      << "epsilon = " << exact(cfg.bound.epsilon) << "\n";
  if (cfg.bound.s) out << "s = " << exact(*cfg.bound.s) << "\n";
  if (cfg.bound.r) out << "r = " << exact(*cfg.bound.r) << "\n";
  if (cfg.bound.k_types) out << "k_types = " << *cfg.bound.k_types << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["timestamp"] = m.timestamp;
  j["status"] = m.status;
  j["outputs"] = m.outputs;
  json hashes = json::object();
  for (const auto& [file, hash] : m.output_hashes) hashes[file] = hash;
  j["output_hashes"] = hashes;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.status = j.at("status").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  for (const auto& [file, hash] : j.at("output_hashes").items()) {
    m.output_hashes.emplace_back(file, hash.get<std::string>());
  }
  return m;
}

std::string aggregate_to_json(const AggregateReport& a) {
  json j;
  j["trials"] = a.trials;
  j["passed"] = a.passed;
  j["bounds"] = json::array();
  for (const auto& b : a.bounds) {
    j["bounds"].push_back({{"name", b.name},
                           {"successes", b.satisfied.successes},
                           {"trials", b.satisfied.trials},
                           {"frequency", b.satisfied.value},
                           {"ci_low", b.satisfied.ci.lo},
                           {"ci_high", b.satisfied.ci.hi},
                           {"vacuous_fraction", b.vacuous_fraction},
                           {"threshold", b.threshold},
                           {"gated", b.gated},
                           {"passed", b.passed}});
  }
  j["metrics"] = json::array();
  for (const auto& m : a.metrics) {
    j["metrics"].push_back({{"name", m.name},
                            {"mean", m.summary.mean},
                            {"stddev", m.summary.stddev},
                            {"count", m.summary.count}});
  }
  return j.dump(2) + "\n";
}

AggregateReport aggregate_from_json(const std::string& text) {
  const json j = json::parse(text);
  AggregateReport a;
  a.trials = j.at("trials").get<std::size_t>();
  a.passed = j.at("passed").get<bool>();
  for (const auto& b : j.at("bounds")) {
    BoundSummary s;
    s.name = b.at("name").get<std::string>();
    s.satisfied.successes = b.at("successes").get<std::size_t>();
    s.satisfied.trials = b.at("trials").get<std::size_t>();
    s.satisfied.value = b.at("frequency").get<double>();
    s.satisfied.ci = {b.at("ci_low").get<double>(), b.at("ci_high").get<double>()};
    s.vacuous_fraction = b.at("vacuous_fraction").get<double>();
    s.threshold = b.at("threshold").get<double>();
    s.gated = b.at("gated").get<bool>();
    s.passed = b.at("passed").get<bool>();
    a.bounds.push_back(s);
  }
  for (const auto& m : j.at("metrics")) {
    a.metrics.push_back({m.at("name").get<std::string>(),
                         Summary{m.at("mean").get<double>(), m.at("stddev").get<double>(),
                                 m.at("count").get<std::size_t>()}});
  }
  return a;
}

// ---------------------------------------------------------------------------

std::string format_number(double x) { return fmt("%.12g", x); }

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records,
                      std::size_t type_count) {
  static const char* const kBounds[] = {"cor1", "corg", "corbal", "corbal_observed", "corfw_tv",
                                        "corfw_mis"};
  out << "trial,seed,mf,missing_mass,halluc_rate,mc_exact,mc_adaptive_b,mis_eps,kl";
  for (const char* b : kBounds) out << ',' << b << "_rhs," << b << "_ok," << b << "_vacuous";
  out << ",gt,tv_fixed_eps,observed_count,posterior_term,markov_event,missing_mass_event";
  for (std::size_t i = 0; i < type_count; ++i) {
    const std::string p = "type" + std::to_string(i) + "_";
    out << ',' << p << "mf," << p << "missing_mass," << p << "halluc_rate," << p
        << "mc_adaptive_b," << p << "cor_types_rhs," << p << "cor_types_ok," << p
        << "cor_types_vacuous";
  }
  out << '\n';
  auto bound = [&](const BoundEvaluation& e) {
    out << ',' << format_number(e.rhs) << ',' << (e.satisfied ? 1 : 0) << ','
        << (e.vacuous ? 1 : 0);
  };
  for (const TrialRecord& r : records) {
    out << r.trial << ',' << r.seed;
    for (double x : {r.mf, r.missing_mass, r.halluc_rate, r.mc_exact, r.mc_adaptive, r.mis_eps,
                     r.kl}) {
      out << ',' << format_number(x);
    }
    for (const BoundEvaluation* e :
         {&r.cor1, &r.corg, &r.corbal, &r.corbal_observed, &r.corfw_tv, &r.corfw_mis}) {
      bound(*e);
    }
    out << ',' << format_number(r.gt) << ',' << format_number(r.tv_fixed) << ','
        << r.observed_count << ',';
    if (r.posterior_term) out << format_number(*r.posterior_term);
    out << ',';
    if (r.markov_event) out << (*r.markov_event ? 1 : 0);
    out << ',' << (r.missing_mass_event ? 1 : 0);
    for (std::size_t i = 0; i < type_count; ++i) {
      const TypeRecord& t = r.types.at(i);
      for (double x : {t.mf, t.missing_mass, t.halluc_rate, t.mc_adaptive}) {
        out << ',' << format_number(x);
      }
      bound(t.cor_types);
    }
    out << '\n';
  }
}

void write_reliability_csv(std::ostream& out, std::span<const ReliabilityRow> rows) {
  out << "bin_value,g_mass,p_mass,bin_size\n";
  for (const ReliabilityRow& r : rows) {
    out << format_number(r.bin_value) << ',' << format_number(r.g_mass) << ','
        << format_number(r.p_mass) << ',' << r.bin_size << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << data;
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t type_count(const ExperimentConfig& cfg) {
  const auto* m = std::get_if<MultiTypeWorld>(&cfg.world);
  return m ? m->types.size() : 0;
}

}  // namespace

RunManifest begin_run(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
  const std::string text = serialize_config(cfg);
  write_file(dir / "config.txt", text);
  RunManifest m;
  m.config_hash = sha256_hex(text);
  m.seed = cfg.seed;
  m.timestamp = utc_timestamp();
  m.status = "running";
  m.outputs = {"config.txt", "manifest.json", "trials.csv", "aggregate.json", "reliability.csv"};
  write_file(dir / "manifest.json", manifest_to_json(m));
  return m;
}

void write_results(const std::filesystem::path& dir, RunManifest& manifest,
                   const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::ostringstream trials;
  write_trials_csv(trials, result.records, type_count(cfg));
  std::vector<ReliabilityRow> rows;
  if (!result.records.empty()) {
    const TrialState st = simulate_trial(cfg, 0);
    rows = reliability_curve(st.world.p(), st.g, AdaptiveBinning{resolve_bound_params(cfg).b});
  }
  std::ostringstream reliability;
  write_reliability_csv(reliability, rows);
  const std::string aggregate = aggregate_to_json(result.aggregate);

  write_file(dir / "trials.csv", trials.str());
  write_file(dir / "aggregate.json", aggregate);
  write_file(dir / "reliability.csv", reliability.str());
  manifest.status = "complete";
  manifest.output_hashes = {{"config.txt", manifest.config_hash},
                            {"trials.csv", sha256_hex(trials.str())},
                            {"aggregate.json", sha256_hex(aggregate)},
                            {"reliability.csv", sha256_hex(reliability.str())}};
  write_file(dir / "manifest.json", manifest_to_json(manifest));
}

}  // namespace monofact
