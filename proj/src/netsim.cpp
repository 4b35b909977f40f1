#include "uwsn/netsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "uwsn/error.hpp"

namespace uwsn {

namespace {

enum class Tag : std::uint8_t { S, I, R };

struct Agent {
  Tag tag = Tag::S;
  bool alive = true;
  Point pos;
};

using Rng = std::mt19937_64;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

bool bernoulli(Rng& rng, double p) {
  // Always consume one draw so the stream layout does not depend on p.
  return uniform01(rng) < p;
}

Point place(Rng& rng, double side) {
  const double x = uniform01(rng) * side;
  const double y = uniform01(rng) * side;
  return {x, y};
}

/// Uniform bucket grid over the deployment square, cell size >= radius.
class Grid {
 public:
  Grid(double side, double radius) : radius_sq_(radius * radius) {
    const double cells = std::clamp(std::floor(side / radius), 1.0, 1024.0);
    cells_ = static_cast<std::size_t>(cells);
    cell_size_ = side / cells;
    buckets_.assign(cells_ * cells_, {});
  }

  void clear() {
    for (auto& b : buckets_) b.clear();
  }

  void insert(std::size_t id, const Point& p) { buckets_[bucket(p)].push_back(id); }

  /// Calls visit(id) for every inserted id within the radius of p.
  template <typename Fn>
  void for_each_near(const Point& p, const std::vector<Agent>& agents, Fn&& visit) const {
    const auto [cx, cy] = cell(p);
    const std::size_t x0 = cx == 0 ? 0 : cx - 1, x1 = std::min(cells_ - 1, cx + 1);
    const std::size_t y0 = cy == 0 ? 0 : cy - 1, y1 = std::min(cells_ - 1, cy + 1);
    for (std::size_t gx = x0; gx <= x1; ++gx) {
      for (std::size_t gy = y0; gy <= y1; ++gy) {
        for (std::size_t id : buckets_[gx * cells_ + gy]) {
          const double dx = agents[id].pos.x - p.x, dy = agents[id].pos.y - p.y;
          if (dx * dx + dy * dy <= radius_sq_) visit(id);
        }
      }
    }
  }

  template <typename Fn>
  void for_each_near(const Point& p, const std::vector<Point>& points, Fn&& visit) const {
    const auto [cx, cy] = cell(p);
    const std::size_t x0 = cx == 0 ? 0 : cx - 1, x1 = std::min(cells_ - 1, cx + 1);
    const std::size_t y0 = cy == 0 ? 0 : cy - 1, y1 = std::min(cells_ - 1, cy + 1);
    for (std::size_t gx = x0; gx <= x1; ++gx) {
      for (std::size_t gy = y0; gy <= y1; ++gy) {
        for (std::size_t id : buckets_[gx * cells_ + gy]) {
          const double dx = points[id].x - p.x, dy = points[id].y - p.y;
          if (dx * dx + dy * dy <= radius_sq_) visit(id);
        }
      }
    }
  }

 private:
  std::pair<std::size_t, std::size_t> cell(const Point& p) const {
    auto clamp_index = [&](double v) {
      const auto k = static_cast<std::ptrdiff_t>(std::floor(v / cell_size_));
      return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, std::ptrdiff_t(cells_) - 1));
    };
    return {clamp_index(p.x), clamp_index(p.y)};
  }

  std::size_t bucket(const Point& p) const {
    const auto [x, y] = cell(p);
    return x * cells_ + y;
  }

  double radius_sq_;
  double cell_size_ = 1.0;
  std::size_t cells_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

Census count(const std::vector<Agent>& agents) {
  Census census;
  for (const Agent& a : agents) {
    if (!a.alive) {
      ++census.dead;
      continue;
    }
    switch (a.tag) {
      case Tag::S:
        ++census.susceptible;
        break;
      case Tag::I:
        ++census.informed;
        break;
      case Tag::R:
        ++census.recovered;
        break;
    }
  }
  return census;
}

void check_probability(double p, const char* key) {
  if (!(p >= 0.0 && p <= 1.0)) throw ModelError(std::string(key) + " must be a probability in [0, 1]");
}

double draw(Rng& rng, const Interval& range) {
  if (range.hi <= range.lo) return range.lo;
  return std::uniform_real_distribution<double>(range.lo, range.hi)(rng);
}

}  // namespace

std::string_view to_string(TopologyKind t) {
  return t == TopologyKind::CompleteMixing ? "complete" : "geometric";
}

TopologyKind parse_topology(std::string_view name) {
  if (name == "complete") return TopologyKind::CompleteMixing;
  if (name == "geometric") return TopologyKind::RandomGeometric;
  throw ModelError("unknown topology '" + std::string(name) + "' (expected complete or geometric)");
}

void validate(const SimParams& p) {
  if (p.n_initial < 1) throw ModelError("n_initial must be >= 1");
  check_probability(p.l, "l");
  check_probability(p.m, "m");
  check_probability(p.c, "c");
  check_probability(p.initial_informed_prob, "initial_informed_prob");
  if (!(p.b >= 0.0) || !std::isfinite(p.b)) throw ModelError("b must be >= 0");
  check_probability(pair_probability(p), "pair transmission probability");
  if (p.topology == TopologyKind::RandomGeometric) {
    if (!(p.radius > 0.0) || !std::isfinite(p.radius)) throw ModelError("radius must be > 0");
    if (!(p.side > 0.0) || !std::isfinite(p.side)) throw ModelError("side must be > 0");
  }
}

double pair_probability(const SimParams& p) {
  if (p.topology == TopologyKind::CompleteMixing && !p.raw_b) {
    return p.b / static_cast<double>(p.n_initial);
  }
  return p.b;
}

CensusSeries simulate(const SimParams& params) {
  validate(params);
  Rng rng(params.seed);
  const bool geometric = params.topology == TopologyKind::RandomGeometric;
  const double p_pair = pair_probability(params);
  const double awaken_mean = params.l * static_cast<double>(params.n_initial);

  std::vector<Agent> agents(params.n_initial);
  if (geometric) {
    for (Agent& a : agents) a.pos = place(rng, params.side);
  }
  for (Agent& a : agents) {
    if (bernoulli(rng, params.initial_informed_prob)) a.tag = Tag::I;
  }

  std::optional<std::size_t> reserve = params.pool;
  std::optional<Grid> grid;
  if (geometric) grid.emplace(params.side, params.radius);

  CensusSeries series;
  series.reserve(params.horizon + 1);
  series.push_back(count(agents));

  std::vector<std::size_t> alive_pre, informed_pre, newly_informed;
  std::vector<std::uint32_t> informed_neighbours;

  for (std::size_t step = 1; step <= params.horizon; ++step) {
    alive_pre.clear();
    informed_pre.clear();
    for (std::size_t k = 0; k < agents.size(); ++k) {
      if (!agents[k].alive) continue;
      alive_pre.push_back(k);
      if (agents[k].tag == Tag::I) informed_pre.push_back(k);
    }

    // (1) awakening
    std::size_t born = 0;
    if (awaken_mean > 0.0) born = std::poisson_distribution<std::size_t>(awaken_mean)(rng);
    if (reserve) {
      born = std::min(born, *reserve);
      *reserve -= born;
    }
    for (std::size_t k = 0; k < born; ++k) {
      Agent a;
      if (geometric) a.pos = place(rng, params.side);
      agents.push_back(a);
    }

    // (2) transmission from the pre-step informed set
    newly_informed.clear();
    if (!informed_pre.empty() && p_pair > 0.0) {
      if (!geometric) {
        const double q = 1.0 - std::pow(1.0 - p_pair, static_cast<double>(informed_pre.size()));
        for (std::size_t k = 0; k < agents.size(); ++k) {
          if (agents[k].alive && agents[k].tag == Tag::S && bernoulli(rng, q)) newly_informed.push_back(k);
        }
      } else {
        grid->clear();
        for (std::size_t k : informed_pre) grid->insert(k, agents[k].pos);
        informed_neighbours.assign(agents.size(), 0);
        for (std::size_t k = 0; k < agents.size(); ++k) {
          if (!agents[k].alive || agents[k].tag != Tag::S) continue;
          grid->for_each_near(agents[k].pos, agents, [&](std::size_t) { ++informed_neighbours[k]; });
        }
        for (std::size_t k = 0; k < agents.size(); ++k) {
          if (informed_neighbours[k] == 0) continue;
          const double q = 1.0 - std::pow(1.0 - p_pair, static_cast<double>(informed_neighbours[k]));
          if (bernoulli(rng, q)) newly_informed.push_back(k);
        }
      }
    }
    for (std::size_t k : newly_informed) agents[k].tag = Tag::I;

    // (3) attack on the pre-step informed set
    for (std::size_t k : informed_pre) {
      if (bernoulli(rng, params.c)) agents[k].tag = Tag::R;
    }

    // (4) natural death of the pre-step population
    for (std::size_t k : alive_pre) {
      if (bernoulli(rng, params.m)) agents[k].alive = false;
    }

    series.push_back(count(agents));
  }
  return series;
}

std::size_t Topology::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& nbrs : adjacency) degree_sum += nbrs.size();
  return degree_sum / 2;
}

double Topology::mean_degree() const {
  if (adjacency.empty()) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(adjacency.size());
}

Topology build_topology(const SimParams& params) {
  validate(params);
  const std::size_t n = params.n_initial;
  Topology topo;
  topo.adjacency.assign(n, {});
  if (params.topology == TopologyKind::CompleteMixing) {
    for (std::size_t u = 0; u < n; ++u) {
      topo.adjacency[u].reserve(n - 1);
      for (std::size_t v = 0; v < n; ++v)
        if (u != v) topo.adjacency[u].push_back(v);
    }
    return topo;
  }

  // Same generator and draw order as simulate(), so the deployed layout coincides.
  Rng rng(params.seed);
  topo.positions.reserve(n);
  for (std::size_t k = 0; k < n; ++k) topo.positions.push_back(place(rng, params.side));

  Grid grid(params.side, params.radius);
  for (std::size_t k = 0; k < n; ++k) grid.insert(k, topo.positions[k]);
  for (std::size_t u = 0; u < n; ++u) {
    grid.for_each_near(topo.positions[u], topo.positions, [&](std::size_t v) {
      if (v != u) topo.adjacency[u].push_back(v);
    });
    std::sort(topo.adjacency[u].begin(), topo.adjacency[u].end());
  }
  return topo;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

McSummary summarize(std::vector<McRun> runs, std::size_t redraws) {
  std::sort(runs.begin(), runs.end(), [](const McRun& a, const McRun& b) { return a.run < b.run; });
  McSummary summary;
  summary.runs = runs.size();
  summary.redraws = redraws;
  for (const McRun& r : runs) {
    Cohort& cohort = r.r0 > 1.0 ? summary.supercritical : summary.subcritical;
    ++cohort.runs;
    cohort.mean_r0 += r.r0;
    cohort.mean_informed += static_cast<double>(r.final_informed);
    cohort.extinction_rate += r.extinct ? 1.0 : 0.0;
    cohort.mean_min_step += static_cast<double>(r.min_informed_step);
  }
  for (Cohort* cohort : {&summary.subcritical, &summary.supercritical}) {
    if (cohort->runs == 0) continue;
    const double n = static_cast<double>(cohort->runs);
    cohort->mean_r0 /= n;
    cohort->mean_informed /= n;
    cohort->extinction_rate /= n;
    cohort->mean_min_step /= n;
  }
  summary.per_run = std::move(runs);
  return summary;
}

McSummary monte_carlo(std::size_t runs, const McRanges& ranges, const SimParams& base,
                      std::size_t threads) {
  if (runs < 1) throw ModelError("runs must be >= 1");
  for (const Interval* range : {&ranges.l, &ranges.m, &ranges.c, &ranges.b}) {
    if (!(range->lo >= 0.0 && range->hi <= 1.0 && range->lo <= range->hi)) {
      throw ModelError("Monte Carlo intervals must satisfy 0 <= lo <= hi <= 1");
    }
  }
  if (ranges.m.hi <= 0.0) throw ModelError("the m interval must contain positive values");
  validate(base);

  std::vector<McRun> results(runs);
  std::vector<std::size_t> redraw_counts(runs, 0);

  auto execute = [&](std::size_t k) {
    Rng rng(derive_seed(base.seed, k));
    McRun run;
    run.run = k;
    run.l = draw(rng, ranges.l);
    run.m = draw(rng, ranges.m);
    while (run.m == 0.0) {
      ++redraw_counts[k];
      run.m = draw(rng, ranges.m);
    }
    run.c = draw(rng, ranges.c);
    run.b = draw(rng, ranges.b);
    run.r0 = run.b * run.l / (run.m * (run.c + run.m));

    SimParams p = base;
    p.l = run.l;
    p.m = run.m;
    p.c = run.c;
    p.b = run.b;
    p.seed = rng();
    const CensusSeries series = simulate(p);

    std::size_t min_informed = series.front().informed;
    for (std::size_t step = 0; step < series.size(); ++step) {
      const std::size_t informed = series[step].informed;
      if (informed == 0) run.extinct = true;
      if (informed < min_informed) {
        min_informed = informed;
        run.min_informed_step = step;
      }
    }
    run.final_informed = series.back().informed;
    results[k] = run;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, runs);
  if (threads <= 1) {
    for (std::size_t k = 0; k < runs; ++k) execute(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < runs; k = next++) execute(k);
      });
    }
  }

  std::size_t redraws = 0;
  for (std::size_t r : redraw_counts) redraws += r;
  return summarize(std::move(results), redraws);
}

}  // namespace uwsn
