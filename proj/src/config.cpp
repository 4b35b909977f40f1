#include "uwsn/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uwsn/error.hpp"

namespace uwsn {

namespace {

constexpr std::array kKeys{
    // models / ode
    KeyInfo{"model", "model variant: sir-basic | sis | sir-death-sit2 | sir-death-sit13 | sir-sleep | sir-vital | sir-global"},
    KeyInfo{"b", "transmission rate b (1/time); SIS: cure rate; net/mc: per-contact rate"},
    KeyInfo{"c", "attack / recovery rate c (1/time; net: probability per step)"},
    KeyInfo{"m", "natural death rate m (1/time; net: probability per step)"},
    KeyInfo{"m_prime", "informed-node death rate m' (1/time), defaults to m"},
    KeyInfo{"l", "awakening rate l (fraction of N per time unit)"},
    KeyInfo{"l_sleep", "sir-sleep awake -> sleeping rate (1/time)"},
    KeyInfo{"l_wake", "sir-sleep sleeping -> awake rate (1/time)"},
    KeyInfo{"k_sleep", "sir-global awake -> sleeping rate (1/time), default 0.1"},
    KeyInfo{"k_wake", "sir-global sleeping -> awake rate (1/time), default 0.1"},
    KeyInfo{"a", "SIS infection rate a (1/time)"},
    KeyInfo{"s0", "initial susceptible fraction (dimensionless)"},
    KeyInfo{"i0", "initial informed fraction (dimensionless)"},
    KeyInfo{"r0", "initial recovered fraction (dimensionless)"},
    KeyInfo{"s_sleep0", "initial sleeping susceptible fraction (dimensionless)"},
    KeyInfo{"i_sleep0", "initial sleeping informed fraction (dimensionless)"},
    KeyInfo{"r_sleep0", "initial sleeping recovered fraction (dimensionless)"},
    KeyInfo{"dt", "integration step (time units), default 0.01"},
    KeyInfo{"horizon", "ode: duration (time units); net/mc: number of steps"},
    KeyInfo{"method", "integration method: rk4 | euler"},
    KeyInfo{"record_every", "ode: keep every k-th step (integer >= 1)"},
    // net / mc
    KeyInfo{"n_initial", "number of initially deployed sensors (count)"},
    KeyInfo{"topology", "complete | geometric"},
    KeyInfo{"radius", "geometric topology connection radius (length units)"},
    KeyInfo{"side", "geometric topology square side (length units)"},
    KeyInfo{"initial_informed_prob", "probability a deployed sensor starts informed"},
    KeyInfo{"pool", "finite reserve of sleeping sensors (count); unbounded if absent"},
    KeyInfo{"raw_b", "complete mixing: use p_pair = b instead of b/N (true|false)"},
    KeyInfo{"runs", "mc: number of simulations (count)"},
    KeyInfo{"l_range", "mc: interval lo,hi for l"},
    KeyInfo{"m_range", "mc: interval lo,hi for m"},
    KeyInfo{"c_range", "mc: interval lo,hi for c"},
    KeyInfo{"b_range", "mc: interval lo,hi for b"},
    // protocol
    KeyInfo{"graph", "protocol: edge-list file, one 'u v' pair per line"},
    KeyInfo{"states", "protocol: optional state file, 'id state compartment' per line"},
    KeyInfo{"daemon", "protocol: central | synchronous"},
    KeyInfo{"tie_break", "protocol: lowest-id | random"},
    KeyInfo{"priority", "protocol: rule priority listed (r1>r2>r3) | attack-override (r2>r1>r3)"},
    KeyInfo{"max_steps", "protocol: scheduler step limit (count)"},
    KeyInfo{"informed_fraction", "protocol: probability a node starts with the datum"},
    KeyInfo{"attack_rate", "protocol: per-cycle probability an informed node is attacked"},
    KeyInfo{"cycles", "protocol: attack cycles (count), 0 disables attacks"},
    KeyInfo{"ticks_per_cycle", "protocol: heal/wake ticks per attack cycle (count)"},
    KeyInfo{"heal_after", "protocol: ticks a locked node stays locked (count)"},
    KeyInfo{"probe_after", "protocol: ticks a node sleeps before probing (count); 'never' disables"},
    KeyInfo{"random_graphs", "protocol: verify this many random connected graphs instead of --graph"},
    KeyInfo{"max_n", "protocol: largest random graph size (count)"},
    // common
    KeyInfo{"seed", "random seed (unsigned 64-bit)"},
    KeyInfo{"out", "output CSV path"},
    KeyInfo{"svg", "output SVG plot path"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key_char(char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
}

}  // namespace

std::span<const KeyInfo> config_keys() { return kKeys; }

const KeyInfo* find_key(std::string_view key) {
  for (const KeyInfo& k : kKeys)
    if (k.key == key) return &k;
  return nullptr;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }

    const std::size_t key_start = line.find_first_not_of(" \t");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value'", line_no, key_start + 1);
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line_no, eq + 1);
    for (std::size_t k = 0; k < key.size(); ++k) {
      if (!valid_key_char(key[k])) {
        throw ConfigError("invalid character in key '" + std::string(key) + "'", line_no, key_start + k + 1);
      }
    }
    if (!find_key(key)) throw ConfigError("unknown key '" + std::string(key) + "'", line_no, key_start + 1);
    if (cfg.has(key)) throw ConfigError("duplicate key '" + std::string(key) + "'", line_no, key_start + 1);

    const std::string_view raw_value = line.substr(eq + 1);
    const std::string_view value = trim(raw_value);
    const std::size_t value_column =
        eq + 2 + (value.empty() ? 0 : static_cast<std::size_t>(value.data() - raw_value.data()));
    if (value.empty()) throw ConfigError("empty value for key '" + std::string(key) + "'", line_no, eq + 2);

    cfg.entries_.push_back({std::string(key), std::string(value), line_no, value_column});
    if (end == text.size()) break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void ExperimentConfig::set(std::string_view key, std::string value) {
  if (!find_key(key)) throw ConfigError("unknown key '" + std::string(key) + "'");
  for (Entry& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      e.line = e.column = 0;
      return;
    }
  }
  entries_.push_back({std::string(key), std::move(value), 0, 0});
}

bool ExperimentConfig::has(std::string_view key) const { return entry(key) != nullptr; }

const ExperimentConfig::Entry* ExperimentConfig::entry(std::string_view key) const {
  for (const Entry& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

void ExperimentConfig::fail(const Entry& e, const std::string& what) const {
  throw ConfigError("key '" + e.key + "': " + what, e.line, e.column);
}

std::optional<std::string> ExperimentConfig::get_string(std::string_view key) const {
  if (const Entry* e = entry(key)) return e->value;
  return std::nullopt;
}

std::optional<double> ExperimentConfig::get_double(std::string_view key) const {
  const Entry* e = entry(key);
  if (!e) return std::nullopt;
  double v = 0.0;
  const char* first = e->value.data();
  const char* last = first + e->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(*e, "expected a number, got '" + e->value + "'");
  return v;
}

std::optional<std::uint64_t> ExperimentConfig::get_uint(std::string_view key) const {
  const Entry* e = entry(key);
  if (!e) return std::nullopt;
  std::uint64_t v = 0;
  const char* first = e->value.data();
  const char* last = first + e->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(*e, "expected an unsigned integer, got '" + e->value + "'");
  return v;
}

std::optional<bool> ExperimentConfig::get_bool(std::string_view key) const {
  const Entry* e = entry(key);
  if (!e) return std::nullopt;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  fail(*e, "expected true or false, got '" + e->value + "'");
}

std::optional<Interval> ExperimentConfig::get_interval(std::string_view key) const {
  const Entry* e = entry(key);
  if (!e) return std::nullopt;
  const auto comma = e->value.find(',');
  if (comma == std::string::npos) fail(*e, "expected 'lo,hi', got '" + e->value + "'");
  auto number = [&](std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) fail(*e, "expected 'lo,hi', got '" + e->value + "'");
    return v;
  };
  const std::string_view text = e->value;
  Interval range{number(text.substr(0, comma)), number(text.substr(comma + 1))};
  if (range.hi < range.lo) fail(*e, "interval upper bound is below the lower bound");
  return range;
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const Entry& e : entries_) out += e.key + " = " + e.value + "\n";
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t k = 0; k < a.entries_.size(); ++k) {
    if (a.entries_[k].key != b.entries_[k].key || a.entries_[k].value != b.entries_[k].value) return false;
  }
  return true;
}

}  // namespace uwsn
