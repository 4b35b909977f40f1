// uwsn: command-line driver for the compartment models, the network simulator and the
// survivability protocol harness.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "uwsn/config.hpp"
#include "uwsn/error.hpp"
#include "uwsn/io.hpp"
#include "uwsn/models.hpp"
#include "uwsn/netsim.hpp"
#include "uwsn/ode.hpp"
#include "uwsn/protocol.hpp"
#include "uwsn/protocol_verify.hpp"

namespace {

using namespace uwsn;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerification = 4;

/// A subcommand whose flags mirror config keys.
struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool raw_b = false;
  CLI::Option* raw_b_flag = nullptr;

  void add(const std::string& key) {
    const KeyInfo* info = find_key(key);
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    options[key] = app->add_option(flag, values[key], std::string(info->help));
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) cfg.set(key, values.at(key));
    if (raw_b_flag && raw_b_flag->count() > 0) cfg.set("raw_b", "true");
    return cfg;
  }
};

Command make_command(CLI::App& root, const std::string& name, const std::string& description,
                     const std::vector<std::string>& keys) {
  Command cmd;
  cmd.app = root.add_subcommand(name, description);
  cmd.app->add_option("--config", cmd.config_path, "experiment file of 'key = value' lines; flags override it");
  for (const std::string& key : keys) cmd.add(key);
  for (const std::string& key : {"seed", "out", "svg"})
    if (!cmd.options.count(key)) cmd.add(key);
  return cmd;
}

// ---------------------------------------------------------------------------------------------

/// Writes to the --out path, or to stdout after the report lines.
class Sink {
 public:
  explicit Sink(const std::optional<std::string>& path) {
    if (path) {
      file_ = std::make_unique<std::ofstream>(*path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot write '" + *path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_svg_file(const std::optional<std::string>& path, std::string_view title, std::string_view x,
                    std::string_view y, const std::vector<PlotSeries>& series) {
  if (!path) return;
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + *path + "'");
  write_svg_plot(out, title, x, y, series);
}

void report(const std::string& line) { std::cout << "# " << line << '\n'; }

template <typename T>
T or_default(const std::optional<T>& v, T fallback) {
  return v ? *v : fallback;
}

std::string seed_text(const ExperimentConfig& cfg) { return std::to_string(or_default(cfg.get_uint("seed"), std::uint64_t{1})); }

// ---------------------------------------------------------------------------------------------
// ode

const std::vector<std::string> kRateKeys{"b", "c", "m", "m_prime", "l", "l_sleep", "l_wake", "k_sleep", "k_wake", "a"};

ModelSpec model_from(const ExperimentConfig& cfg) {
  const auto name = cfg.get_string("model");
  if (!name) throw ConfigError("missing required key 'model'");
  ModelSpec spec{parse_variant(*name), {}};
  RateParams& p = spec.params;
  std::map<std::string, std::optional<double>*> slots{
      {"b", &p.b},        {"c", &p.c},           {"m", &p.m},           {"m_prime", &p.m_prime},
      {"l", &p.l},        {"l_sleep", &p.l_sleep}, {"l_wake", &p.l_wake}, {"k_sleep", &p.k_sleep},
      {"k_wake", &p.k_wake}, {"a", &p.a}};
  for (const auto& [key, slot] : slots) *slot = cfg.get_double(key);
  (void)resolve(spec);
  return spec;
}

CompartmentState initial_state(const ExperimentConfig& cfg, Variant v) {
  const double i0 = or_default(cfg.get_double("i0"), 0.1);
  const double r0 = or_default(cfg.get_double("r0"), 0.0);
  const double ss = or_default(cfg.get_double("s_sleep0"), 0.0);
  const double is = or_default(cfg.get_double("i_sleep0"), 0.0);
  const double rs = or_default(cfg.get_double("r_sleep0"), 0.0);
  const bool sleepers = dimension(v) > 3;
  const double s0 = or_default(cfg.get_double("s0"), 1.0 - i0 - (dimension(v) > 2 ? r0 : 0.0) - (sleepers ? ss + is + rs : 0.0));
  return sleepers ? make_state(s0, i0, r0, ss, is, rs) : make_state(s0, i0, dimension(v) > 2 ? r0 : 0.0);
}

std::string describe(const CompartmentState& x, Eigen::Index dim) {
  std::string out = "(";
  for (Eigen::Index k = 0; k < dim; ++k) out += (k ? ", " : "") + fmt::format("{:.6g}", x(k));
  return out + ")";
}

int run_ode(const Command& cmd) {
  const ExperimentConfig cfg = cmd.resolve();
  const ModelSpec spec = model_from(cfg);
  IntegrationConfig ic;
  ic.dt = or_default(cfg.get_double("dt"), ic.dt);
  ic.horizon = or_default(cfg.get_double("horizon"), ic.horizon);
  if (auto m = cfg.get_string("method")) ic.method = parse_method(*m);
  ic.record_every = or_default(cfg.get_uint("record_every"), std::uint64_t{1});
  validate(ic);
  const CompartmentState init = initial_state(cfg, spec.variant);
  const Eigen::Index dim = dimension(spec.variant);

  Metadata meta{{"model", std::string(to_string(spec.variant))}};
  report("model=" + std::string(to_string(spec.variant)));
  if (const auto r0 = reproduction_number(spec)) {
    report(fmt::format("R0={:.4g}", *r0));
    meta.emplace_back("R0", format_number(*r0));
  } else {
    report("R0=n/a");
  }
  for (const EquilibriumReport& eq : equilibria(spec)) {
    std::string eig;
    for (const auto& e : eq.eigenvalues) {
      if (!eig.empty()) eig += ' ';
      eig += e.imag() == 0.0 ? fmt::format("{:.6g}", e.real()) : fmt::format("{:.6g}{:+.6g}i", e.real(), e.imag());
    }
    report(fmt::format("equilibrium kind={} point={} classification={} eigenvalues=[{}]{}", to_string(eq.kind),
                       describe(eq.point, dim), to_string(eq.classification), eig,
                       eq.conserved_direction ? " conserved-direction=1" : ""));
  }

  const Trajectory<double> traj = integrate(spec, init, ic);
  double peak = 0.0;
  for (const auto& x : traj.states) peak = std::max(peak, x(kI));
  report(fmt::format("peak_i={:.6g} at t={:.6g}", peak, or_default(traj.event_time(EventKind::PeakI), 0.0)));
  if (const auto t = traj.event_time(EventKind::Extinction)) report(fmt::format("extinction at t={:.6g}", *t));
  if (spec.variant == Variant::SirBasic) {
    const PeakResult p = peak_infected(spec, init(kS), init(kR));
    report(fmt::format("peak_i_closed_form={:.6g} regime={}", p.value,
                       p.regime == PeakRegime::Outbreak ? "outbreak" : "monotone-decrease"));
    report(fmt::format("final_size={:.6g}", final_size(spec, init(kS), init(kR))));
  }
  meta.emplace_back("method", std::string(to_string(ic.method)));
  meta.emplace_back("dt", format_number(ic.dt));
  meta.emplace_back("horizon", format_number(ic.horizon));

  Sink sink(cfg.get_string("out"));
  write_trajectory_csv(sink.stream(), traj, meta);

  std::vector<PlotSeries> series;
  const char* names[] = {"s", "i", "r", "s_sleep", "i_sleep", "r_sleep"};
  for (Eigen::Index k = 0; k < dim; ++k) {
    PlotSeries s{names[k], traj.times, {}};
    for (const auto& x : traj.states) s.y.push_back(x(k));
    series.push_back(std::move(s));
  }
  write_svg_file(cfg.get_string("svg"), "compartment fractions, " + std::string(to_string(spec.variant)), "time",
                 "fraction", series);
  return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// net / mc

SimParams sim_from(const ExperimentConfig& cfg) {
  SimParams p;
  p.n_initial = or_default(cfg.get_uint("n_initial"), std::uint64_t{p.n_initial});
  p.l = or_default(cfg.get_double("l"), p.l);
  p.m = or_default(cfg.get_double("m"), p.m);
  p.c = or_default(cfg.get_double("c"), p.c);
  p.b = or_default(cfg.get_double("b"), p.b);
  if (auto t = cfg.get_string("topology")) p.topology = parse_topology(*t);
  p.radius = or_default(cfg.get_double("radius"), p.radius);
  p.side = or_default(cfg.get_double("side"), p.side);
  p.horizon = or_default(cfg.get_uint("horizon"), std::uint64_t{p.horizon});
  p.seed = or_default(cfg.get_uint("seed"), p.seed);
  p.initial_informed_prob = or_default(cfg.get_double("initial_informed_prob"), p.initial_informed_prob);
  if (auto pool = cfg.get_uint("pool")) p.pool = *pool;
  p.raw_b = or_default(cfg.get_bool("raw_b"), false);
  validate(p);
  return p;
}

Metadata sim_metadata(const SimParams& p) {
  Metadata meta{{"seed", std::to_string(p.seed)},
                {"n_initial", std::to_string(p.n_initial)},
                {"topology", std::string(to_string(p.topology))},
                {"p_pair", format_number(pair_probability(p))},
                {"horizon", std::to_string(p.horizon)}};
  if (p.topology == TopologyKind::RandomGeometric) meta.emplace_back("radius", format_number(p.radius));
  return meta;
}

int run_net(const Command& cmd) {
  const ExperimentConfig cfg = cmd.resolve();
  const SimParams p = sim_from(cfg);
  Metadata meta = sim_metadata(p);
  for (const auto& [key, v] : {std::pair{"l", p.l}, std::pair{"m", p.m}, std::pair{"c", p.c}, std::pair{"b", p.b}})
    meta.emplace_back(key, format_number(v));
  report("seed=" + std::to_string(p.seed));
  report(fmt::format("p_pair={:.6g} topology={}", pair_probability(p), to_string(p.topology)));
  if (p.m > 0.0) report(fmt::format("R0={:.4g}", p.b * p.l / (p.m * (p.c + p.m))));

  const CensusSeries series = simulate(p);
  const Census& last = series.back();
  report(fmt::format("final step={} S={} I={} R={} Dead={}", series.size() - 1, last.susceptible, last.informed,
                     last.recovered, last.dead));

  Sink sink(cfg.get_string("out"));
  write_census_csv(sink.stream(), series, meta);

  std::vector<PlotSeries> plot{{"S", {}, {}}, {"I", {}, {}}, {"R", {}, {}}, {"Dead", {}, {}}};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = static_cast<double>(k);
    const Census& c = series[k];
    const double v[] = {double(c.susceptible), double(c.informed), double(c.recovered), double(c.dead)};
    for (std::size_t j = 0; j < 4; ++j) {
      plot[j].x.push_back(t);
      plot[j].y.push_back(v[j]);
    }
  }
  write_svg_file(cfg.get_string("svg"), "sensor census", "time step", "sensors", plot);
  return kExitOk;
}

std::size_t thread_cap() {
  const char* env = std::getenv("UWSN_THREADS");
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0) throw ConfigError("UWSN_THREADS must be a positive integer");
    threads = std::min<std::size_t>(threads, v);
  }
  return threads;
}

int run_mc(const Command& cmd) {
  const ExperimentConfig cfg = cmd.resolve();
  const std::uint64_t runs = or_default(cfg.get_uint("runs"), std::uint64_t{100});
  if (runs == 0) throw ConfigError("runs must be >= 1");
  SimParams base = sim_from(cfg);
  McRanges ranges;
  ranges.l = or_default(cfg.get_interval("l_range"), ranges.l);
  ranges.m = or_default(cfg.get_interval("m_range"), ranges.m);
  ranges.c = or_default(cfg.get_interval("c_range"), ranges.c);
  ranges.b = or_default(cfg.get_interval("b_range"), ranges.b);

  const McSummary s = monte_carlo(runs, ranges, base, thread_cap());
  report("seed=" + std::to_string(base.seed));
  report(fmt::format("runs={} redraws={}", s.runs, s.redraws));
  for (const auto& [name, c] : {std::pair{"R0<=1", &s.subcritical}, std::pair{"R0>1", &s.supercritical}}) {
    report(fmt::format("cohort {} runs={} mean_R0={:.4g} mean_final_I={:.4g} extinction_rate={:.4g} "
                       "mean_min_I_step={:.4g}",
                       name, c->runs, c->mean_r0, c->mean_informed, c->extinction_rate, c->mean_min_step));
  }

  Metadata meta = sim_metadata(base);
  meta.emplace_back("runs", std::to_string(runs));
  for (const auto& [key, r] : {std::pair{"l_range", ranges.l}, std::pair{"m_range", ranges.m},
                               std::pair{"c_range", ranges.c}, std::pair{"b_range", ranges.b}})
    meta.emplace_back(key, format_number(r.lo) + "," + format_number(r.hi));
  Sink sink(cfg.get_string("out"));
  write_mc_csv(sink.stream(), s, meta);

  PlotSeries sub{"final I, R0 <= 1", {}, {}}, sup{"final I, R0 > 1", {}, {}};
  for (const McRun& r : s.per_run) {
    PlotSeries& target = r.r0 > 1.0 ? sup : sub;
    target.x.push_back(static_cast<double>(r.run));
    target.y.push_back(static_cast<double>(r.final_informed));
  }
  write_svg_file(cfg.get_string("svg"), "Monte Carlo campaign", "run", "informed sensors at the horizon", {sub, sup});
  return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// protocol

struct ProtocolSettings {
  SchedulerConfig scheduler;
  double informed_fraction = 0.1;
  std::size_t cycles = 0;
  AttackCycleConfig attack;
};

ProtocolSettings protocol_from(const ExperimentConfig& cfg) {
  ProtocolSettings s;
  if (auto d = cfg.get_string("daemon")) s.scheduler.daemon = parse_daemon(*d);
  if (auto t = cfg.get_string("tie_break")) s.scheduler.tie_break = parse_tie_break(*t);
  if (auto p = cfg.get_string("priority")) s.scheduler.priority = parse_rule_priority(*p);
  s.scheduler.seed = or_default(cfg.get_uint("seed"), std::uint64_t{1});
  s.scheduler.max_steps = or_default(cfg.get_uint("max_steps"), std::uint64_t{s.scheduler.max_steps});
  s.informed_fraction = or_default(cfg.get_double("informed_fraction"), s.informed_fraction);
  if (!(s.informed_fraction >= 0.0 && s.informed_fraction <= 1.0))
    throw ConfigError("informed_fraction must be in [0, 1]");
  s.cycles = or_default(cfg.get_uint("cycles"), std::uint64_t{0});
  s.attack.scheduler = s.scheduler;
  s.attack.cycles = s.cycles;
  s.attack.attack_rate = or_default(cfg.get_double("attack_rate"), s.attack.attack_rate);
  if (!(s.attack.attack_rate >= 0.0 && s.attack.attack_rate <= 1.0)) throw ConfigError("attack_rate must be in [0, 1]");
  s.attack.ticks_per_cycle = or_default(cfg.get_uint("ticks_per_cycle"), std::uint64_t{s.attack.ticks_per_cycle});
  s.attack.lifecycle.heal_after = or_default(cfg.get_uint("heal_after"), std::uint64_t{s.attack.lifecycle.heal_after});
  if (auto probe = cfg.get_string("probe_after")) {
    if (*probe == "never") {
      s.attack.lifecycle.probe_after.reset();
    } else {
      s.attack.lifecycle.probe_after = *cfg.get_uint("probe_after");
    }
  }
  s.attack.seed = derive_seed(s.scheduler.seed, 0xa77ac6);
  return s;
}

struct ProtocolOutcome {
  History history;
  VerificationVerdict verdict;
  bool step_limit = false;
  bool bound_applies = true;
  bool passed = false;
};

ProtocolOutcome execute_protocol(ProtocolGraph& g, const ProtocolSettings& s) {
  ProtocolOutcome out;
  if (s.cycles > 0) {
    AttackCycleRun run = run_attack_cycles(g, s.attack);
    out.history = std::move(run.history);
    out.step_limit = run.step_limit;
  } else {
    const SchedulerResult r = run_scheduler(g, s.scheduler);
    out.history.append(r.trace);
    out.step_limit = r.termination == Termination::StepLimit;
  }
  out.verdict = verify(g, out.history, !out.step_limit);
  // the move bound is claimed for the central daemon only
  out.bound_applies = s.scheduler.daemon == Daemon::Central;
  out.passed = out.verdict.quiescent && out.verdict.legitimate && out.verdict.lemmas_hold() &&
               (!out.bound_applies || out.verdict.within_bound());
  return out;
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }
std::string pass_fail(bool v) { return v ? "pass" : "fail"; }

int run_protocol(const Command& cmd) {
  const ExperimentConfig cfg = cmd.resolve();
  const ProtocolSettings s = protocol_from(cfg);
  Metadata meta{{"seed", std::to_string(s.scheduler.seed)},
                {"daemon", std::string(to_string(s.scheduler.daemon))},
                {"tie_break", std::string(to_string(s.scheduler.tie_break))},
                {"priority", std::string(to_string(s.scheduler.priority))},
                {"cycles", std::to_string(s.cycles)}};
  report("seed=" + std::to_string(s.scheduler.seed));
  report(fmt::format("daemon={} tie_break={} priority={}", to_string(s.scheduler.daemon),
                     to_string(s.scheduler.tie_break), to_string(s.scheduler.priority)));

  if (const auto count = cfg.get_uint("random_graphs")) {
    if (*count == 0) throw ConfigError("random_graphs must be >= 1");
    const std::uint64_t max_n = or_default(cfg.get_uint("max_n"), std::uint64_t{50});
    if (max_n == 0) throw ConfigError("max_n must be >= 1");
    std::mt19937_64 rng(s.scheduler.seed);
    std::size_t failures = 0;
    Sink sink(cfg.get_string("out"));
    meta.emplace_back("random_graphs", std::to_string(*count));
    meta.emplace_back("max_n", std::to_string(max_n));
    write_metadata(sink.stream(), meta);
    sink.stream() << "graph,nodes,edges,moves,move_bound,quiescent,legitimate,lemma_violations\n";
    for (std::uint64_t k = 0; k < *count; ++k) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
      const double extra = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
      ProtocolGraph g = random_connected_graph(n, extra, rng);
      seed_informed(g, s.informed_fraction, derive_seed(s.scheduler.seed, k));
      ProtocolSettings local = s;
      local.scheduler.seed = derive_seed(s.scheduler.seed, k + *count);
      local.attack.scheduler.seed = local.scheduler.seed;
      local.attack.seed = derive_seed(local.scheduler.seed, 0xa77ac6);
      const ProtocolOutcome o = execute_protocol(g, local);
      const VerificationVerdict& v = o.verdict;
      const std::size_t lemma = v.lemma1.size() + v.lemma2.size() + v.lemma4.size() + v.lemma3.size();
      fmt::print(sink.stream(), "{},{},{},{},{},{},{},{}\n", k, v.nodes, g.edge_count(), v.moves, v.move_bound,
                 v.quiescent ? 1 : 0, v.legitimate ? 1 : 0, lemma);
      if (!o.passed) ++failures;
    }
    report(fmt::format("graphs={} failures={}", *count, failures));
    report(std::string("verdict=") + (failures == 0 ? "PASS" : "FAIL"));
    return failures == 0 ? kExitOk : kExitVerification;
  }

  const auto graph_path = cfg.get_string("graph");
  if (!graph_path) throw ConfigError("protocol needs --graph or --random-graphs");
  std::ifstream graph_in(*graph_path);
  if (!graph_in) throw ConfigError("cannot open graph file '" + *graph_path + "'");
  ProtocolGraph g;
  try {
    g = parse_edge_list(graph_in);
  } catch (const ConfigError& e) {
    throw ConfigError(*graph_path + ": " + e.what());
  }
  if (const auto states_path = cfg.get_string("states")) {
    std::ifstream states_in(*states_path);
    if (!states_in) throw ConfigError("cannot open state file '" + *states_path + "'");
    try {
      apply_state_file(states_in, g);
    } catch (const ConfigError& e) {
      throw ConfigError(*states_path + ": " + e.what());
    }
  } else {
    seed_informed(g, s.informed_fraction, s.scheduler.seed);
  }

  const ProtocolOutcome o = execute_protocol(g, s);
  const VerificationVerdict& v = o.verdict;
  report(fmt::format("nodes={} edges={} moves={} bound={} within_bound={}", v.nodes, g.edge_count(), v.moves,
                     v.move_bound, o.bound_applies ? yes_no(v.within_bound()) : "n/a"));
  report(fmt::format("quiescent={} legitimate={}", yes_no(v.quiescent), yes_no(v.legitimate)));
  report(fmt::format("lemma1={} lemma2={} lemma3={} lemma4={}", pass_fail(v.lemma1.empty()),
                     pass_fail(v.lemma2.empty()), pass_fail(v.quiescent && v.lemma3.empty()),
                     pass_fail(v.lemma4.empty())));
  for (const auto* list : {&v.lemma1, &v.lemma2, &v.lemma4})
    for (const LemmaViolation& bad : *list) report(fmt::format("violation node={} step={}: {}", value(bad.node), bad.step, bad.detail));
  report(std::string("verdict=") + (o.passed ? "PASS" : "FAIL"));

  Sink sink(cfg.get_string("out"));
  write_trace_csv(sink.stream(), o.history.moves, meta);

  PlotSeries cumulative{"moves", {}, {}}, bound{"2n bound", {}, {}};
  for (std::size_t k = 0; k < o.history.moves.size(); ++k) {
    cumulative.x.push_back(static_cast<double>(o.history.moves[k].step));
    cumulative.y.push_back(static_cast<double>(k + 1));
  }
  if (!cumulative.x.empty()) {
    bound.x = {cumulative.x.front(), cumulative.x.back()};
    bound.y = {double(v.move_bound), double(v.move_bound)};
  }
  write_svg_file(cfg.get_string("svg"), "protocol moves", "step", "cumulative moves", {cumulative, bound});
  return o.passed ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data survivability toolkit for unattended wireless sensor networks"};
  app.require_subcommand(1);

  std::vector<std::string> ode_keys{"model"};
  ode_keys.insert(ode_keys.end(), kRateKeys.begin(), kRateKeys.end());
  for (const char* k : {"s0", "i0", "r0", "s_sleep0", "i_sleep0", "r_sleep0", "dt", "horizon", "method", "record_every"})
    ode_keys.emplace_back(k);
  Command ode = make_command(app, "ode", "integrate a compartment model; CSV t,s,i,r,s_sleep,i_sleep,r_sleep", ode_keys);

  const std::vector<std::string> sim_keys{"n_initial", "l", "m", "c", "b", "topology", "radius", "side",
                                          "horizon", "initial_informed_prob", "pool"};
  Command net = make_command(app, "net", "simulate one sensor network; CSV step,S,I,R,Dead", sim_keys);
  net.raw_b_flag = net.app->add_flag("--raw-b", net.raw_b, "complete mixing: use p_pair = b instead of b/N");

  std::vector<std::string> mc_keys{"runs", "l_range", "m_range", "c_range", "b_range"};
  for (const std::string& k : sim_keys)
    if (k != "l" && k != "m" && k != "c" && k != "b") mc_keys.push_back(k);
  Command mc = make_command(app, "mc",
                            "Monte Carlo campaign over random (l, m, c, b); CSV run,l,m,c,b,R0,extinct,final_I,min_I_step "
                            "(UWSN_THREADS caps worker threads)",
                            mc_keys);
  mc.raw_b_flag = mc.app->add_flag("--raw-b", mc.raw_b, "complete mixing: use p_pair = b instead of b/N");

  Command protocol = make_command(
      app, "protocol",
      "run and verify the three-rule scheduling protocol; CSV "
      "step,node,rule,state_before,state_after,compartment_before,compartment_after",
      {"graph", "states", "daemon", "tie_break", "priority", "max_steps", "informed_fraction", "attack_rate", "cycles",
       "ticks_per_cycle", "heal_after", "probe_after", "random_graphs", "max_n"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (ode.app->parsed()) return run_ode(ode);
    if (net.app->parsed()) return run_net(net);
    if (mc.app->parsed()) return run_mc(mc);
    if (protocol.app->parsed()) return run_protocol(protocol);
  } catch (const ConfigError& e) {
    std::cerr << "uwsn: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "uwsn: numeric failure: " << e.what() << " (last valid t = " << e.last_valid_time() << ")\n";
    return kExitNumeric;
  } catch (const ModelError& e) {
    std::cerr << "uwsn: invalid parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ProtocolError& e) {
    std::cerr << "uwsn: protocol error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
