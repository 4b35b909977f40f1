#pragma once

// Flat `key = value` experiment files. One file may drive any subcommand; keys a subcommand
// does not use are ignored by it, unknown keys are rejected at parse time.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uwsn/netsim.hpp"

namespace uwsn {

struct KeyInfo {
  std::string_view key;
  std::string_view help;  ///< includes units
};

/// Every accepted key, in documentation order.
std::span<const KeyInfo> config_keys();
const KeyInfo* find_key(std::string_view key);

class ExperimentConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;    ///< 0 when set programmatically
    std::size_t column = 0;  ///< column of the value
  };

  /// Total parse: every failure is a ConfigError with line and column.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);

  /// Inserts or overwrites. Throws ConfigError for an unknown key.
  void set(std::string_view key, std::string value);
  bool has(std::string_view key) const;
  const Entry* entry(std::string_view key) const;
  std::span<const Entry> entries() const { return entries_; }

  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::uint64_t> get_uint(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  /// "lo,hi"
  std::optional<Interval> get_interval(std::string_view key) const;

  /// Canonical text; parse(serialize()) reproduces the same entries.
  std::string serialize() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

 private:
  [[noreturn]] void fail(const Entry& e, const std::string& what) const;

  std::vector<Entry> entries_;
};

}  // namespace uwsn
