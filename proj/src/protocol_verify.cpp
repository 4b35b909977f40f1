#include "uwsn/protocol_verify.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "uwsn/netsim.hpp"

namespace uwsn {

void History::append(const MoveTrace& trace) {
  for (const MoveRecord& rec : trace) {
    events.push_back({HistoryKind::Move, rec.node, moves.size()});
    moves.push_back(rec);
  }
}

void History::append(const AttackResult& attack) {
  for (NodeId id : attack.attacked) events.push_back({HistoryKind::Attack, id, 0});
}

void History::append(const std::vector<Transition>& transitions) {
  for (const Transition& t : transitions) {
    events.push_back({t.kind == TransitionKind::Healed ? HistoryKind::Heal : HistoryKind::Wake, t.node, 0});
  }
}

std::size_t History::wake_count() const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(),
                                                [](const HistoryEvent& e) { return e.kind == HistoryKind::Wake; }));
}

std::vector<LemmaViolation> scan_lemma1(const ProtocolGraph& g, const History& h) {
  std::vector<LemmaViolation> out;
  std::vector<bool> after_r2(g.size(), false);
  std::vector<bool> attacked_since(g.size(), false);
  for (const HistoryEvent& e : h.events) {
    const std::size_t k = g.index_of(e.node);
    switch (e.kind) {
      case HistoryKind::Attack:
        attacked_since[k] = true;
        for (std::size_t j : g.neighbors(k)) attacked_since[j] = true;
        break;
      case HistoryKind::Wake:
        after_r2[k] = false;
        break;
      case HistoryKind::Heal:
        break;
      case HistoryKind::Move: {
        const MoveRecord& rec = h.moves[e.move];
        if (after_r2[k] && !attacked_since[k]) {
          out.push_back({e.node, rec.step,
                         "node moved (" + std::string(to_string(rec.rule)) + ") after its r2 without a nearby attack"});
        }
        after_r2[k] = rec.rule == Rule::R2;
        attacked_since[k] = false;
        break;
      }
    }
  }
  return out;
}

std::vector<LemmaViolation> scan_lemma2(const ProtocolGraph& g, const History& h) {
  std::vector<LemmaViolation> out;
  // Moves made by a node since the earliest r2 of a neighbour that is still pending.
  std::vector<std::optional<std::size_t>> watch(g.size());
  for (const HistoryEvent& e : h.events) {
    const std::size_t k = g.index_of(e.node);
    if (e.kind == HistoryKind::Wake) {
      watch[k].reset();
      continue;
    }
    if (e.kind != HistoryKind::Move) continue;
    const MoveRecord& rec = h.moves[e.move];
    if (watch[k]) {
      const std::size_t count = ++*watch[k];
      if (count > 1 || rec.rule != Rule::R1) {
        out.push_back({e.node, rec.step,
                       "neighbour of an r2 node made move #" + std::to_string(count) + " (" +
                           std::string(to_string(rec.rule)) + ")"});
        watch[k].reset();
      }
    }
    if (rec.rule == Rule::R2) {
      for (std::size_t j : g.neighbors(k))
        if (!watch[j]) watch[j] = 0;
    }
  }
  return out;
}

std::vector<LemmaViolation> scan_lemma4(const ProtocolGraph& g, const History& h) {
  std::vector<LemmaViolation> out;
  std::vector<std::vector<Rule>> window(g.size());
  for (const HistoryEvent& e : h.events) {
    const std::size_t k = g.index_of(e.node);
    if (e.kind == HistoryKind::Wake) {
      window[k].clear();
      continue;
    }
    if (e.kind != HistoryKind::Move) continue;
    const MoveRecord& rec = h.moves[e.move];
    window[k].push_back(rec.rule);
    const auto& w = window[k];
    if (w.size() > 2) {
      out.push_back({e.node, rec.step, "more than two moves between probing activations"});
    } else if (w.size() == 2) {
      const bool r2_and_r3 = (w[0] == Rule::R2 && w[1] == Rule::R3) || (w[0] == Rule::R3 && w[1] == Rule::R2);
      if (!r2_and_r3) {
        out.push_back({e.node, rec.step,
                       "two-move window " + std::string(to_string(w[0])) + "," + std::string(to_string(w[1]))});
      }
    }
  }
  return out;
}

std::vector<NodeId> scan_lemma3(const ProtocolGraph& g) {
  std::vector<NodeId> out;
  const auto classes = classify_nodes(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (classes[k] == NodeClass::Unclassified) out.push_back(g.node(k).id);
  return out;
}

AttackCycleRun run_attack_cycles(ProtocolGraph& g, const AttackCycleConfig& cfg) {
  AttackCycleRun run;
  LifecycleClock clock(g);
  std::size_t phase = 0;
  std::size_t next_step = 1;

  auto converge = [&] {
    SchedulerConfig sc = cfg.scheduler;
    sc.seed = derive_seed(cfg.scheduler.seed, phase++);
    SchedulerResult r = run_scheduler(g, sc, next_step);
    next_step += r.steps;
    run.history.append(r.trace);
    if (r.termination == Termination::StepLimit) {
      run.step_limit = true;
      return;
    }
    ++run.checks.quiescent_points;
    if (!scan_lemma3(g).empty()) ++run.checks.unclassified_points;
    if (!check_legitimate(g).legitimate) ++run.checks.illegitimate_points;
  };
  auto tick = [&](const LifecycleConfig& lc) { run.history.append(clock.heal_and_wake(g, lc)); };

  converge();
  for (std::size_t c = 0; c < cfg.cycles && !run.step_limit; ++c) {
    run.history.append(inject_attack(g, cfg.attack_rate, derive_seed(cfg.seed, c)));
    for (std::size_t t = 0; t < cfg.ticks_per_cycle && !run.step_limit; ++t) {
      tick(cfg.lifecycle);
      converge();
    }
  }

  // Settle: no wake-ups until every locked node has healed, then wake every sleeper once.
  const LifecycleConfig heal_only{cfg.lifecycle.heal_after, std::nullopt};
  auto any_locked = [&] {
    return std::any_of(g.nodes().begin(), g.nodes().end(),
                       [](const ProtocolNode& n) { return n.state == NodeState::Locked; });
  };
  for (std::size_t t = 0; t <= cfg.lifecycle.heal_after + 1 && any_locked() && !run.step_limit; ++t) {
    tick(heal_only);
    converge();
  }
  if (!run.step_limit) {
    tick(LifecycleConfig{cfg.lifecycle.heal_after, 0});
    converge();
  }
  return run;
}

VerificationVerdict verify(const ProtocolGraph& g, const History& h, bool quiescent) {
  VerificationVerdict v;
  v.nodes = g.size();
  v.moves = h.moves.size();
  v.move_bound = 2 * (g.size() + h.wake_count());
  v.quiescent = quiescent;
  v.legitimate = check_legitimate(g).legitimate;
  v.lemma1 = scan_lemma1(g, h);
  v.lemma2 = scan_lemma2(g, h);
  v.lemma4 = scan_lemma4(g, h);
  if (quiescent) v.lemma3 = scan_lemma3(g);
  return v;
}

// ---------------------------------------------------------------------------------------------
// Exhaustive schedule exploration

namespace {

class ScheduleExplorer {
 public:
  explicit ScheduleExplorer(const ProtocolGraph& g) : g_(g), memo_(std::size_t(1) << (2 * g.size()), kUnseen) {}

  std::size_t longest(std::uint32_t code) {
    int& slot = memo_[code];
    if (slot != kUnseen) return static_cast<std::size_t>(slot);
    ++result.reachable;

    decode(code);
    std::vector<std::pair<std::size_t, Rule>> moves;
    for (std::size_t k = 0; k < g_.size(); ++k) {
      const RuleSet rules = enabled_rules_at(g_, k);
      for (Rule r : {Rule::R1, Rule::R2, Rule::R3})
        if (rules.contains(r)) moves.emplace_back(k, r);
    }
    if (moves.empty()) {
      ++result.quiescent;
      if (!scan_lemma3(g_).empty()) result.lemma3_everywhere = false;
      if (!check_legitimate(g_).legitimate) result.legitimate_everywhere = false;
      slot = 0;
      return 0;
    }

    std::size_t best = 0;
    for (const auto& [k, rule] : moves) {
      decode(code);
      apply_rule(g_, g_.node(k).id, rule);
      best = std::max(best, 1 + longest(encode()));
    }
    slot = static_cast<int>(best);
    return best;
  }

  std::uint32_t encode() const {
    std::uint32_t code = 0;
    for (std::size_t k = 0; k < g_.size(); ++k) code |= std::uint32_t(g_.node(k).state) << (2 * k);
    return code;
  }

  ExhaustiveResult result;

 private:
  void decode(std::uint32_t code) {
    for (std::size_t k = 0; k < g_.size(); ++k) g_.node(k).state = NodeState((code >> (2 * k)) & 3u);
  }

  static constexpr int kUnseen = -1;
  ProtocolGraph g_;
  std::vector<int> memo_;
};

}  // namespace

ExhaustiveResult explore_all_schedules(const ProtocolGraph& g) {
  if (g.size() > 12) throw ProtocolError("explore_all_schedules: graph too large");
  for (const ProtocolNode& n : g.nodes())
    if (n.compartment == Compartment::R) throw ProtocolError("explore_all_schedules: attack-free graphs only");
  ScheduleExplorer explorer(g);
  explorer.result.max_moves = explorer.longest(explorer.encode());
  return explorer.result;
}

void for_each_connected_graph(std::size_t n, const std::function<void(const ProtocolGraph&)>& fn) {
  if (n == 0) return;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  const std::uint64_t masks = std::uint64_t(1) << pairs.size();

  std::vector<std::size_t> parent(n);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::size_t components = n;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (!(mask >> e & 1)) continue;
      const std::size_t a = root(pairs[e].first), b = root(pairs[e].second);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    if (components != 1) continue;
    ProtocolGraph g;
    for (std::size_t k = 0; k < n; ++k) g.add_node(NodeId{k + 1});
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask >> e & 1) g.add_edge(NodeId{pairs[e].first + 1}, NodeId{pairs[e].second + 1});
    fn(g);
  }
}

ProtocolGraph random_connected_graph(std::size_t n, double extra_edge_prob, std::mt19937_64& rng,
                                     bool permute_ids) {
  std::vector<std::uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::uint64_t{1});
  if (permute_ids) std::shuffle(ids.begin(), ids.end(), rng);

  ProtocolGraph g;
  for (std::size_t k = 0; k < n; ++k) g.add_node(NodeId{ids[k]});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t parent = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    g.add_edge(NodeId{ids[k]}, NodeId{ids[parent]});
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (u(rng) < extra_edge_prob) g.add_edge(NodeId{ids[a]}, NodeId{ids[b]});
  return g;
}

}  // namespace uwsn
