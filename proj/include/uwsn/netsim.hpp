#pragma once

// Agent-based discrete-time simulation of an unattended sensor network under attack.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace uwsn {

enum class TopologyKind { CompleteMixing, RandomGeometric };

std::string_view to_string(TopologyKind t);
TopologyKind parse_topology(std::string_view name);

struct SimParams {
  std::size_t n_initial = 100;
  double l = 0.017;  ///< awakening: Poisson(l * n_initial) new nodes per step
  double m = 0.0018; ///< per-step death probability of an awake node
  double c = 0.035;  ///< per-step probability an informed node loses the datum
  double b = 0.33;   ///< transmission rate (see raw_b)
  TopologyKind topology = TopologyKind::CompleteMixing;
  double radius = 0.15;  ///< geometric topology: connection radius
  double side = 1.0;     ///< geometric topology: side of the deployment square
  std::size_t horizon = 60;
  std::uint64_t seed = 1;
  double initial_informed_prob = 0.1;
  std::optional<std::size_t> pool;  ///< finite reserve of sleeping sensors; unbounded when empty
  /// Complete mixing only: use p_pair = b instead of b / n_initial.
  bool raw_b = false;
};

/// Throws ModelError on out-of-range parameters.
void validate(const SimParams& params);

/// Per-pair transmission probability used by simulate().
double pair_probability(const SimParams& params);

struct Census {
  std::size_t susceptible = 0;
  std::size_t informed = 0;
  std::size_t recovered = 0;
  std::size_t dead = 0;

  std::size_t total() const { return susceptible + informed + recovered + dead; }
  friend bool operator==(const Census&, const Census&) = default;
};

/// Row k holds the census after step k; row 0 is the initial deployment.
using CensusSeries = std::vector<Census>;

/// Each step: awaken, transmit, attack, die. Attack and death act on the pre-step membership;
/// nodes informed during a step relay from the next one. Deterministic given params.seed.
CensusSeries simulate(const SimParams& params);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Topology {
  std::vector<Point> positions;                   ///< empty for complete mixing
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t edge_count() const;
  double mean_degree() const;
};

/// Adjacency over the n_initial deployed nodes. Geometric nodes are placed uniformly in the
/// square with a generator seeded from params.seed; edges join nodes within `radius`.
Topology build_topology(const SimParams& params);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct McRanges {
  Interval l{0.0, 0.2};
  Interval m{0.0, 0.01};
  Interval c{0.0, 0.1};
  Interval b{0.0, 0.033};
};

struct McRun {
  std::size_t run = 0;
  double l = 0.0, m = 0.0, c = 0.0, b = 0.0;
  double r0 = 0.0;
  bool extinct = false;          ///< I reached 0 at some step
  std::size_t final_informed = 0;
  std::size_t min_informed_step = 0;  ///< first step attaining the minimum of I
};

struct Cohort {
  std::size_t runs = 0;
  double mean_r0 = 0.0;
  double mean_informed = 0.0;  ///< mean of final I
  double extinction_rate = 0.0;
  double mean_min_step = 0.0;
};

struct McSummary {
  std::size_t runs = 0;
  std::size_t redraws = 0;  ///< draws rejected because m = 0
  Cohort subcritical;       ///< R0 <= 1
  Cohort supercritical;     ///< R0 > 1
  std::vector<McRun> per_run;
};

/// Seed of run `index` derived from `master` (splitmix64; independent streams per run).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Draws (l, m, c, b) uniformly in the ranges, computes R0 = b l / (m (c + m)), simulates with
/// the remaining fields of `base`, and aggregates per cohort. `threads` = 0 uses hardware
/// concurrency. The result does not depend on the thread count.
McSummary monte_carlo(std::size_t runs, const McRanges& ranges, const SimParams& base,
                      std::size_t threads = 1);

/// Cohort aggregation of a set of runs (order-independent).
McSummary summarize(std::vector<McRun> runs, std::size_t redraws);

}  // namespace uwsn
