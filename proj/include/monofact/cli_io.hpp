#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "monofact/harness.hpp"

namespace monofact {

inline constexpr const char* kToolVersion = "1.0.0";

/// Flat `key = value` text. `#` starts a comment; a `[section]` line
/// prefixes the following keys with `section.`. Throws ConfigError naming
/// the offending key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);
/// Canonical text; parse_config_text(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

std::string sha256_hex(const std::string& data);

struct RunManifest {
  std::string version = kToolVersion;
  std::string config_hash;  ///< SHA-256 of config.txt
  std::uint64_t seed = 0;
  std::string timestamp;  ///< UTC, ISO 8601
  std::string status;     ///< "running" before the trials, "complete" after
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> output_hashes;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

std::string aggregate_to_json(const AggregateReport& a);
AggregateReport aggregate_from_json(const std::string& text);

/// 12 significant digits, '.' decimal separator.
std::string format_number(double x);

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records,
                      std::size_t type_count);
void write_reliability_csv(std::ostream& out, std::span<const ReliabilityRow> rows);

/// Writes config.txt and manifest.json (status "running").
RunManifest begin_run(const std::filesystem::path& dir, const ExperimentConfig& cfg);
/// Writes trials.csv, aggregate.json, reliability.csv and the final manifest.
void write_results(const std::filesystem::path& dir, RunManifest& manifest,
                   const ExperimentConfig& cfg, const ExperimentResult& result);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& data);

/// Exit codes: 0 all checks pass, 1 a bound check failed, 2 usage or config error.
int cli_main(int argc, char** argv);

}  // namespace monofact
