// Acceptance checks. Prints one PASS/FAIL line per criterion, plus indented detail lines,
// and exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "uwsn/models.hpp"
#include "uwsn/netsim.hpp"
#include "uwsn/ode.hpp"
#include "uwsn/protocol.hpp"
#include "uwsn/protocol_verify.hpp"

using namespace uwsn;

namespace {

int failures = 0;

void detail(const std::string& line) { fmt::print("    {}\n", line); }

void criterion(int number, const std::string& title, const std::function<bool()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    detail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} {} {} ({:.1f} s)\n", ok ? "PASS" : "FAIL", number, title, secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

ModelSpec endemic_spec(double b = 0.33) {
  ModelSpec spec{Variant::SirVital, {}};
  spec.params.b = b;
  spec.params.l = 0.017;
  spec.params.m = 0.0018;
  spec.params.c = 0.035;
  return spec;
}

double max_abs(const CompartmentState& a, const CompartmentState& b, Eigen::Index dim) {
  return (a - b).head(dim).cwiseAbs().maxCoeff();
}

std::vector<double> sorted_real(const std::vector<std::complex<double>>& eig, double* max_imag) {
  std::vector<double> out;
  for (const auto& e : eig) {
    out.push_back(e.real());
    *max_imag = std::max(*max_imag, std::abs(e.imag()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------------------------

bool extinction_theorems() {
  bool ok = true;
  std::mt19937_64 rng(2000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Variant v : {Variant::SirDeathSit2, Variant::SirDeathSit13}) {
    ModelSpec spec{v, {}};
    spec.params.b = 0.4;
    spec.params.c = 0.15;
    spec.params.m = 0.01;
    const auto eq = equilibria(spec);
    if (eq.size() != 1) {
      detail(fmt::format("{}: expected one equilibrium, got {}", to_string(v), eq.size()));
      ok = false;
      continue;
    }
    IntegrationConfig ic;
    ic.horizon = 2000;
    ic.record_every = 1000;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double a = u(rng), b = u(rng), c = u(rng);
      const double sum = a + b + c;
      const auto traj = integrate(spec, make_state(a / sum, b / sum, c / sum), ic);
      worst = std::max(worst, max_abs(traj.back(), eq[0].point, 3));
    }
    const Rates<double> r = resolve(spec);
    std::vector<double> expected = v == Variant::SirDeathSit2 ? std::vector<double>{0.0, -r.c, -r.m}
                                                              : std::vector<double>{-r.m, -(r.c + r.m_prime), -r.m};
    std::sort(expected.begin(), expected.end());
    double imag = 0.0;
    const auto got = sorted_real(eq[0].eigenvalues, &imag);
    double eig_err = imag;
    for (std::size_t k = 0; k < got.size(); ++k) eig_err = std::max(eig_err, std::abs(got[k] - expected[k]));
    const bool this_ok = worst <= 1e-4 && got.size() == 3 && eig_err <= 1e-9;
    detail(fmt::format("{}: 20 starts, max distance to equilibrium at t=2000 = {:.3g}; eigenvalue error {:.3g}",
                       to_string(v), worst, eig_err));
    ok = ok && this_ok;
  }
  return ok;
}

bool threshold_dichotomy() {
  IntegrationConfig ic;
  ic.dt = 0.05;
  ic.horizon = 20000;
  ic.record_every = 10000;
  const CompartmentState init = make_state(0.9, 0.1, 0.0);

  const ModelSpec above = endemic_spec();
  double i_star = -1.0;
  for (const auto& e : equilibria(above))
    if (e.kind == EquilibriumKind::Endemic) i_star = e.point(kI);
  const double i_end = integrate(above, init, ic).back()(kI);

  const double r0 = *reproduction_number(above);
  const ModelSpec below = endemic_spec(0.33 * 0.5 / r0);
  const double i_low = integrate(below, init, ic).back()(kI);

  detail(fmt::format("R0={:.2f}: i(T)={:.6f}, endemic i*={:.6f}", r0, i_end, i_star));
  detail(fmt::format("R0={:.2f}: i(T)={:.3g}", *reproduction_number(below), i_low));
  return i_star > 0.0 && std::abs(i_end - i_star) <= 1e-3 && i_low < 1e-6;
}

bool closed_forms() {
  ModelSpec spec{Variant::SirBasic, {}};
  spec.params.b = 0.4;
  spec.params.c = 0.15;
  IntegrationConfig ic;
  ic.dt = 0.001;
  ic.horizon = 400;
  const auto traj = integrate(spec, make_state(0.9, 0.1, 0.0), ic);
  double peak = 0.0;
  for (const auto& x : traj.states) peak = std::max(peak, x(kI));
  const PeakResult p = peak_infected(spec, 0.9, 0.0);
  const double s_inf = final_size(spec, 0.9, 0.0);
  detail(fmt::format("peak: closed form {:.6f}, trajectory {:.6f}", p.value, peak));
  detail(fmt::format("s(inf): closed form {:.6f}, trajectory {:.6f}", s_inf, traj.back()(kS)));
  return p.regime == PeakRegime::Outbreak && std::abs(p.value - peak) <= 1e-3 && std::abs(s_inf - traj.back()(kS)) <= 1e-3;
}

struct MeanField {
  double max_s = 0.0;
  double max_i = 0.0;
};

MeanField mean_field_gap(double b, Method method, double dt) {
  constexpr std::size_t seeds = 50;
  SimParams p;
  p.n_initial = 2000;
  p.b = b;
  p.horizon = 60;
  std::vector<double> s(61, 0.0), i(61, 0.0);
  for (std::size_t k = 0; k < seeds; ++k) {
    p.seed = derive_seed(2000, k);
    const CensusSeries c = simulate(p);
    for (std::size_t t = 0; t <= 60; ++t) {
      s[t] += static_cast<double>(c[t].susceptible) / 2000.0 / seeds;
      i[t] += static_cast<double>(c[t].informed) / 2000.0 / seeds;
    }
  }
  IntegrationConfig ic;
  ic.method = method;
  ic.dt = dt;
  ic.horizon = 60;
  ic.record_every = static_cast<std::size_t>(std::lround(1.0 / dt));
  const auto traj = integrate(endemic_spec(b), make_state(s[0], i[0], 0.0), ic);
  MeanField gap;
  for (std::size_t t = 0; t <= 60; ++t) {
    gap.max_s = std::max(gap.max_s, std::abs(traj.states[t](kS) - s[t]));
    gap.max_i = std::max(gap.max_i, std::abs(traj.states[t](kI) - i[t]));
  }
  return gap;
}

bool mean_field() {
  const MeanField rk = mean_field_gap(0.33, Method::RungeKutta4, 0.01);
  detail(fmt::format("b=0.33 vs RK4 dt=0.01: max |ds|={:.4f}, max |di|={:.4f} (tolerance 0.05)", rk.max_s, rk.max_i));
  const MeanField eu = mean_field_gap(0.33, Method::ExplicitEuler, 1.0);
  detail(fmt::format("info: b=0.33 vs unit-step Euler: max |ds|={:.4f}, max |di|={:.4f}", eu.max_s, eu.max_i));
  const MeanField slow = mean_field_gap(0.1, Method::RungeKutta4, 0.01);
  detail(fmt::format("info: b=0.1 vs RK4: max |ds|={:.4f}, max |di|={:.4f}", slow.max_s, slow.max_i));
  return rk.max_s <= 0.05 && rk.max_i <= 0.05;
}

std::string cohorts(const McSummary& s) {
  return fmt::format("R0<=1: n={} ext={:.3f} meanI={:.2f} | R0>1: n={} ext={:.3f} meanI={:.2f}", s.subcritical.runs,
                     s.subcritical.extinction_rate, s.subcritical.mean_informed, s.supercritical.runs,
                     s.supercritical.extinction_rate, s.supercritical.mean_informed);
}

bool monte_carlo_campaign() {
  SimParams base;
  base.raw_b = true;
  base.seed = 1;
  const McSummary small = monte_carlo(100, McRanges{}, base, 4);
  const McSummary big = monte_carlo(1000, McRanges{}, base, 4);
  detail("complete mixing, p_pair = b, 100 runs: " + cohorts(small));
  detail("complete mixing, p_pair = b, 1000 runs: " + cohorts(big));
  const bool ordering = small.subcritical.extinction_rate > small.supercritical.extinction_rate;
  const bool rates = big.supercritical.extinction_rate <= 0.10 && big.subcritical.extinction_rate >= 0.08;
  const bool informed = small.supercritical.mean_informed > small.subcritical.mean_informed;
  const auto near = [](double v, double target) { return std::abs(v - target) <= 0.5 * target; };
  const bool levels = near(small.supercritical.mean_informed, 33.12) && near(small.subcritical.mean_informed, 15.50);
  detail(fmt::format("extinction ordering {}, 1000-run rates {}, informed ordering {}, informed levels {}",
                     ordering ? "ok" : "no", rates ? "ok" : "no", informed ? "ok" : "no", levels ? "ok" : "no"));

  SimParams scaled;
  scaled.seed = 1;
  detail("info: complete mixing, p_pair = b/N, 1000 runs: " + cohorts(monte_carlo(1000, McRanges{}, scaled, 4)));
  SimParams geo;
  geo.seed = 1;
  geo.topology = TopologyKind::RandomGeometric;
  geo.radius = 0.15;
  detail("info: geometric r=0.15, 1000 runs: " + cohorts(monte_carlo(1000, McRanges{}, geo, 4)));
  return ordering && rates && informed && levels;
}

// ---------------------------------------------------------------------------------------------
// protocol corpus shared by the move-bound and lemma criteria

struct Corpus {
  std::size_t exhaustive_graphs = 0;
  std::size_t exhaustive_configs = 0;
  std::size_t exhaustive_over_bound = 0;
  std::size_t exhaustive_illegitimate = 0;
  std::size_t exhaustive_lemma3 = 0;
  std::size_t exhaustive_trace_lemmas = 0;

  std::size_t random_runs = 0;
  std::size_t random_over_bound = 0;
  std::size_t random_unfinished = 0;
  std::size_t random_illegitimate = 0;
  std::size_t random_lemmas = 0;

  std::size_t attack_runs = 0;
  std::size_t attack_unfinished = 0;
  std::size_t attack_lemmas = 0;
  std::size_t attack_unclassified = 0;
  std::size_t attack_quiescent_points = 0;
  std::size_t attack_over_bound = 0;
};

SchedulerConfig central(TieBreak tie, std::uint64_t seed) {
  SchedulerConfig cfg;
  cfg.tie_break = tie;
  cfg.seed = seed;
  return cfg;
}

std::size_t trace_lemmas(const ProtocolGraph& g, const History& h) {
  return scan_lemma1(g, h).size() + scan_lemma2(g, h).size() + scan_lemma4(g, h).size();
}

Corpus build_corpus() {
  Corpus c;
  for (std::size_t n = 1; n <= 6; ++n) {
    for_each_connected_graph(n, [&](const ProtocolGraph& g) {
      ++c.exhaustive_graphs;
      const ExhaustiveResult r = explore_all_schedules(g);
      c.exhaustive_configs += r.reachable;
      if (r.max_moves > 2 * n) ++c.exhaustive_over_bound;
      if (!r.legitimate_everywhere) ++c.exhaustive_illegitimate;
      if (!r.lemma3_everywhere) ++c.exhaustive_lemma3;
      for (TieBreak tie : {TieBreak::LowestId, TieBreak::SeededRandom}) {
        ProtocolGraph run = g;
        History h;
        h.append(run_scheduler(run, central(tie, c.exhaustive_graphs)).trace);
        c.exhaustive_trace_lemmas += trace_lemmas(run, h);
      }
    });
  }

  std::mt19937_64 rng(10000);
  for (std::size_t k = 0; k < 10000; ++k) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    const double extra = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    ProtocolGraph base = random_connected_graph(n, extra, rng);
    seed_informed(base, 0.3, derive_seed(10000, k));
    for (TieBreak tie : {TieBreak::LowestId, TieBreak::SeededRandom}) {
      ProtocolGraph g = base;
      const SchedulerResult r = run_scheduler(g, central(tie, derive_seed(k, 1)));
      History h;
      h.append(r.trace);
      const VerificationVerdict v = verify(g, h, r.termination == Termination::Quiescent);
      ++c.random_runs;
      if (v.moves > 2 * n) ++c.random_over_bound;
      if (!v.quiescent) ++c.random_unfinished;
      if (!v.legitimate) ++c.random_illegitimate;
      if (!v.lemmas_hold()) ++c.random_lemmas;
    }

    // attack, lock, heal and wake cycles on the same graph
    ProtocolGraph g = base;
    AttackCycleConfig cfg;
    cfg.scheduler = central(k % 2 ? TieBreak::SeededRandom : TieBreak::LowestId, derive_seed(k, 2));
    cfg.seed = derive_seed(k, 3);
    const AttackCycleRun run = run_attack_cycles(g, cfg);
    ++c.attack_runs;
    if (run.step_limit) ++c.attack_unfinished;
    c.attack_lemmas += trace_lemmas(g, run.history);
    c.attack_unclassified += run.checks.unclassified_points;
    c.attack_quiescent_points += run.checks.quiescent_points;
    if (run.history.moves.size() > 2 * (g.size() + run.history.wake_count())) ++c.attack_over_bound;
  }
  return c;
}

bool move_bound(const Corpus& c) {
  detail(fmt::format("exhaustive n<=6: {} graphs, {} reachable configurations, over bound {}, illegitimate {}",
                     c.exhaustive_graphs, c.exhaustive_configs, c.exhaustive_over_bound, c.exhaustive_illegitimate));
  detail(fmt::format("random n<=50: {} runs, over bound {}, not quiescent {}, illegitimate {}", c.random_runs,
                     c.random_over_bound, c.random_unfinished, c.random_illegitimate));
  return c.exhaustive_graphs == 1 + 1 + 4 + 38 + 728 + 26704 && c.exhaustive_over_bound == 0 &&
         c.exhaustive_illegitimate == 0 && c.random_runs == 20000 && c.random_over_bound == 0 &&
         c.random_unfinished == 0 && c.random_illegitimate == 0;
}

bool lemma_suite(const Corpus& c) {
  detail(fmt::format("exhaustive: lemma 3 failures {}, trace lemma violations {}", c.exhaustive_lemma3,
                     c.exhaustive_trace_lemmas));
  detail(fmt::format("random: runs with a lemma violation {}", c.random_lemmas));
  detail(fmt::format("attack cycles: {} runs, {} quiescent points, unclassified {}, trace violations {}, "
                     "unfinished {}, moves over 2(n + wake-ups) {}",
                     c.attack_runs, c.attack_quiescent_points, c.attack_unclassified, c.attack_lemmas,
                     c.attack_unfinished, c.attack_over_bound));
  return c.exhaustive_lemma3 == 0 && c.exhaustive_trace_lemmas == 0 && c.random_lemmas == 0 && c.attack_lemmas == 0 &&
         c.attack_unclassified == 0 && c.attack_unfinished == 0 && c.attack_quiescent_points > 0;
}

// ---------------------------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("uwsn-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "path3.txt") << "1 2\n2 3\n";

  const std::string cli = UWSN_CLI_PATH;
  struct Case {
    std::string name;
    std::string env;
    std::string args;
  };
  const std::vector<Case> cases{
      {"ode", "", "ode --model sir-vital --b 0.33 --l 0.017 --m 0.0018 --c 0.035 --horizon 200"},
      {"ode-euler", "", "ode --model sir-global --b 0.4 --c 0.15 --m 0.01 --l 0.02 --method euler --dt 0.1"},
      {"net", "", "net --seed 1"},
      {"net-geometric", "", "net --seed 7 --topology geometric --radius 0.15 --pool 20"},
      {"mc", "UWSN_THREADS=1", "mc --runs 60 --seed 3"},
      {"mc-threads", "UWSN_THREADS=4", "mc --runs 60 --seed 3"},
      {"protocol", "", "protocol --graph " + (dir / "path3.txt").string()},
      {"protocol-random", "", "protocol --random-graphs 50 --max-n 30 --tie-break random --seed 9"},
      {"protocol-attack", "", "protocol --random-graphs 20 --cycles 3 --priority attack-override --seed 4"},
  };

  bool ok = true;
  std::string mc_reference;
  for (const Case& c : cases) {
    std::string outputs[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / fmt::format("{}-{}.csv", c.name, k);
      const std::string cmd = fmt::format("{} {} {} --out {} > {} 2>&1", c.env, cli, c.args, out.string(),
                                          (dir / "stdout.txt").string());
      codes[k] = std::system(cmd.c_str());
      outputs[k] = slurp(out);
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    detail(fmt::format("{}: exit {}/{}, {} bytes, {}", c.name, codes[0], codes[1], outputs[0].size(),
                       same ? "identical" : "DIFFERENT"));
    ok = ok && same && codes[0] == codes[1];
    if (c.name == "mc") mc_reference = outputs[0];
    if (c.name == "mc-threads" && outputs[0] != mc_reference) {
      detail("mc output depends on the thread count");
      ok = false;
    }
  }
  fs::remove_all(dir);
  return ok;
}

}  // namespace

int main() {
  criterion(1, "reproduction number of the endemic set", [] {
    const double r0 = *reproduction_number(endemic_spec());
    detail(fmt::format("R0 = {:.6f}", r0));
    return std::abs(r0 - 84.69) <= 0.01;
  });
  criterion(2, "extinction for the death models", extinction_theorems);
  criterion(3, "threshold dichotomy for vital dynamics", threshold_dichotomy);
  criterion(4, "closed-form peak and final size against RK4", closed_forms);
  criterion(5, "mean-field agreement, N0=2000, 50 seeds", mean_field);
  criterion(6, "Monte Carlo campaign cohorts", monte_carlo_campaign);

  fmt::print("    building protocol corpus...\n");
  std::fflush(stdout);
  const auto start = std::chrono::steady_clock::now();
  const Corpus corpus = build_corpus();
  fmt::print("    corpus built in {:.1f} s\n",
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  criterion(7, "protocol move bound and legitimacy", [&] { return move_bound(corpus); });
  criterion(8, "lemma scans incl. attack cycles", [&] { return lemma_suite(corpus); });
  criterion(9, "byte-identical CLI reruns", determinism);

  fmt::print("{} of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
