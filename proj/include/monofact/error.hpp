#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monofact {

/// Violated precondition on a library call (bad weights, mismatched universes, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not available for the given model kind.
class UnsupportedModel : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration problem; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A failure inside one experiment trial.
class TrialError : public std::runtime_error {
 public:
  TrialError(std::size_t trial, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
  std::size_t trial() const { return trial_; }

 private:
  std::size_t trial_;
};

}  // namespace monofact
