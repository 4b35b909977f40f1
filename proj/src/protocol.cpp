#include "uwsn/protocol.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

namespace uwsn {

std::string_view to_string(NodeState s) {
  switch (s) {
    case NodeState::Working:
      return "working";
    case NodeState::Probing:
      return "probing";
    case NodeState::Sleeping:
      return "sleeping";
    case NodeState::Locked:
      return "locked";
  }
  return "unknown";
}

std::string_view to_string(Compartment c) {
  switch (c) {
    case Compartment::S:
      return "S";
    case Compartment::I:
      return "I";
    case Compartment::R:
      return "R";
  }
  return "?";
}

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::R1:
      return "r1";
    case Rule::R2:
      return "r2";
    case Rule::R3:
      return "r3";
  }
  return "?";
}

NodeState parse_node_state(std::string_view s) {
  for (NodeState st : {NodeState::Working, NodeState::Probing, NodeState::Sleeping, NodeState::Locked})
    if (to_string(st) == s) return st;
  throw ProtocolError("unknown node state '" + std::string(s) + "'");
}

Compartment parse_compartment(std::string_view s) {
  for (Compartment c : {Compartment::S, Compartment::I, Compartment::R})
    if (to_string(c) == s) return c;
  throw ProtocolError("unknown compartment '" + std::string(s) + "'");
}

std::string_view to_string(RulePriority p) {
  return p == RulePriority::Listed ? "listed" : "attack-override";
}

RulePriority parse_rule_priority(std::string_view s) {
  if (s == "listed") return RulePriority::Listed;
  if (s == "attack-override") return RulePriority::AttackOverride;
  throw ProtocolError("unknown rule priority '" + std::string(s) + "'");
}

std::string_view to_string(Daemon d) { return d == Daemon::Central ? "central" : "synchronous"; }
std::string_view to_string(TieBreak t) { return t == TieBreak::LowestId ? "lowest-id" : "random"; }

Daemon parse_daemon(std::string_view s) {
  if (s == "central") return Daemon::Central;
  if (s == "synchronous") return Daemon::Synchronous;
  throw ProtocolError("unknown daemon '" + std::string(s) + "'");
}

TieBreak parse_tie_break(std::string_view s) {
  if (s == "lowest-id") return TieBreak::LowestId;
  if (s == "random") return TieBreak::SeededRandom;
  throw ProtocolError("unknown tie-break '" + std::string(s) + "'");
}

std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Independent:
      return "independent";
    case NodeClass::Dominated:
      return "dominated";
    case NodeClass::LockedClass:
      return "locked";
    case NodeClass::Unclassified:
      return "unclassified";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------------------------
// Graph

std::size_t ProtocolGraph::add_node(NodeId id, NodeState state, Compartment compartment) {
  const auto [it, inserted] = index_.emplace(value(id), nodes_.size());
  if (!inserted) throw ProtocolError("duplicate node id " + std::to_string(value(id)));
  nodes_.push_back({id, state, compartment});
  adjacency_.emplace_back();
  return it->second;
}

void ProtocolGraph::add_edge(NodeId u, NodeId v) {
  if (u == v) throw ProtocolError("self-loop on node " + std::to_string(value(u)));
  auto ensure = [&](NodeId id) {
    if (auto k = find(id)) return *k;
    return add_node(id);
  };
  const std::size_t a = ensure(u);
  const std::size_t b = ensure(v);
  auto& na = adjacency_[a];
  if (std::find(na.begin(), na.end(), b) != na.end()) return;
  na.push_back(b);
  adjacency_[b].push_back(a);
}

std::size_t ProtocolGraph::edge_count() const {
  std::size_t sum = 0;
  for (const auto& nbrs : adjacency_) sum += nbrs.size();
  return sum / 2;
}

std::optional<std::size_t> ProtocolGraph::find(NodeId id) const {
  const auto it = index_.find(value(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ProtocolGraph::index_of(NodeId id) const {
  if (auto k = find(id)) return *k;
  throw ProtocolError("unknown node id " + std::to_string(value(id)));
}

void ProtocolGraph::reset_states() {
  for (ProtocolNode& n : nodes_) {
    n.state = NodeState::Probing;
    n.compartment = Compartment::S;
  }
}

// ---------------------------------------------------------------------------------------------
// Guards

Predicates predicates_at(const ProtocolGraph& g, std::size_t index) {
  Predicates p;
  const std::uint64_t self = value(g.node(index).id);
  for (std::size_t k : g.neighbors(index)) {
    const ProtocolNode& j = g.node(k);
    if (j.compartment == Compartment::R) p.attacked = true;
    if (j.state == NodeState::Working) {
      p.working = true;
      if (value(j.id) < self) p.working_lower = true;
    } else if (j.state == NodeState::Probing && value(j.id) < self) {
      p.probing_lower = true;
    }
  }
  return p;
}

Predicates predicates(const ProtocolGraph& g, NodeId id) { return predicates_at(g, g.index_of(id)); }

RuleSet enabled_rules_at(const ProtocolGraph& g, std::size_t index) {
  const ProtocolNode& n = g.node(index);
  RuleSet rules;
  if (n.state != NodeState::Probing && n.state != NodeState::Working) return rules;
  const Predicates p = predicates_at(g, index);
  if (n.state == NodeState::Probing) {
    if (p.working) rules.insert(Rule::R1);
    if ((!p.working && !p.probing_lower) || p.attacked) rules.insert(Rule::R2);
  } else if (p.working_lower) {
    rules.insert(Rule::R3);
  }
  return rules;
}

RuleSet enabled_rules(const ProtocolGraph& g, NodeId id) { return enabled_rules_at(g, g.index_of(id)); }

Rule preferred(RuleSet rules, RulePriority priority) {
  if (rules.empty()) throw ProtocolError("no rule enabled");
  if (priority == RulePriority::AttackOverride && rules.contains(Rule::R2)) return Rule::R2;
  for (Rule r : {Rule::R1, Rule::R2, Rule::R3})
    if (rules.contains(r)) return r;
  return Rule::R3;
}

// ---------------------------------------------------------------------------------------------
// Moves

namespace {

struct Outcome {
  std::size_t index = 0;
  Rule rule = Rule::R1;
  NodeState state = NodeState::Sleeping;
  Compartment compartment = Compartment::S;
  std::vector<std::size_t> locked;
};

/// Effect of `rule` at `index` evaluated on `g` without mutating it.
Outcome compute_move(const ProtocolGraph& g, std::size_t index, Rule rule) {
  const ProtocolNode& self = g.node(index);
  Outcome out{index, rule, self.state, self.compartment, {}};
  switch (rule) {
    case Rule::R1: {
      for (std::size_t k : g.neighbors(index)) {
        const ProtocolNode& j = g.node(k);
        if (j.state == NodeState::Working && j.compartment == Compartment::I) {
          out.compartment = Compartment::I;
          break;
        }
      }
      out.state = NodeState::Sleeping;
      break;
    }
    case Rule::R2:
      for (std::size_t k : g.neighbors(index))
        if (g.node(k).compartment == Compartment::R) out.locked.push_back(k);
      std::sort(out.locked.begin(), out.locked.end(),
                [&](std::size_t a, std::size_t b) { return value(g.node(a).id) < value(g.node(b).id); });
      out.state = NodeState::Working;
      break;
    case Rule::R3: {
      if (self.compartment == Compartment::S) {
        for (std::size_t k : g.neighbors(index)) {
          const ProtocolNode& j = g.node(k);
          if (j.state == NodeState::Working && value(j.id) < value(self.id) &&
              j.compartment == Compartment::I) {
            out.compartment = Compartment::I;
            break;
          }
        }
      }
      out.state = NodeState::Sleeping;
      break;
    }
  }
  return out;
}

MoveRecord make_record(const ProtocolGraph& before, const Outcome& o, std::size_t step) {
  const ProtocolNode& n = before.node(o.index);
  MoveRecord rec;
  rec.step = step;
  rec.node = n.id;
  rec.rule = o.rule;
  rec.state_before = n.state;
  rec.state_after = o.state;
  rec.compartment_before = n.compartment;
  rec.compartment_after = o.compartment;
  for (std::size_t k : o.locked) rec.locked.push_back(before.node(k).id);
  return rec;
}

void commit(ProtocolGraph& g, const Outcome& o) {
  g.node(o.index).state = o.state;
  g.node(o.index).compartment = o.compartment;
}

void commit_locks(ProtocolGraph& g, const Outcome& o) {
  for (std::size_t k : o.locked) g.node(k).state = NodeState::Locked;
}

bool enabled(const ProtocolGraph& g, std::size_t index) { return !enabled_rules_at(g, index).empty(); }

/// Enabled-node bookkeeping for the central daemon: ordered by id, with O(1) random pick.
class EnabledPool {
 public:
  EnabledPool(const ProtocolGraph& g, TieBreak tie) : g_(g), tie_(tie), pos_(g.size(), kAbsent) {
    for (std::size_t k = 0; k < g.size(); ++k) refresh(k);
  }

  bool empty() const { return items_.empty(); }

  std::size_t pick(std::mt19937_64& rng) const {
    if (tie_ == TieBreak::LowestId) return ordered_.begin()->second;
    std::uniform_int_distribution<std::size_t> dist(0, items_.size() - 1);
    return items_[dist(rng)];
  }

  void refresh(std::size_t k) {
    const bool on = enabled(g_, k);
    const bool present = pos_[k] != kAbsent;
    if (on == present) return;
    const std::uint64_t id = value(g_.node(k).id);
    if (on) {
      pos_[k] = items_.size();
      items_.push_back(k);
      if (tie_ == TieBreak::LowestId) ordered_.emplace(id, k);
    } else {
      const std::size_t at = pos_[k];
      const std::size_t last = items_.back();
      items_[at] = last;
      pos_[last] = at;
      items_.pop_back();
      pos_[k] = kAbsent;
      if (tie_ == TieBreak::LowestId) ordered_.erase({id, k});
    }
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  const ProtocolGraph& g_;
  TieBreak tie_;
  std::vector<std::size_t> items_;
  std::vector<std::size_t> pos_;
  std::set<std::pair<std::uint64_t, std::size_t>> ordered_;
};

}  // namespace

MoveRecord apply_rule(ProtocolGraph& g, NodeId id, Rule rule, std::size_t step) {
  const std::size_t index = g.index_of(id);
  if (!enabled_rules_at(g, index).contains(rule)) {
    throw ProtocolError("rule " + std::string(to_string(rule)) + " is not enabled at node " +
                        std::to_string(value(id)));
  }
  const Outcome o = compute_move(g, index, rule);
  MoveRecord rec = make_record(g, o, step);
  commit(g, o);
  commit_locks(g, o);
  return rec;
}

SchedulerResult run_scheduler(ProtocolGraph& g, const SchedulerConfig& cfg, std::size_t first_step) {
  SchedulerResult result;
  std::mt19937_64 rng(cfg.seed);

  if (cfg.daemon == Daemon::Central) {
    EnabledPool pool(g, cfg.tie_break);
    while (!pool.empty()) {
      if (result.steps >= cfg.max_steps) {
        result.termination = Termination::StepLimit;
        return result;
      }
      const std::size_t k = pool.pick(rng);
      const Outcome o = compute_move(g, k, preferred(enabled_rules_at(g, k), cfg.priority));
      result.trace.push_back(make_record(g, o, first_step + result.steps));
      commit(g, o);
      commit_locks(g, o);
      ++result.steps;

      pool.refresh(k);
      for (std::size_t j : g.neighbors(k)) pool.refresh(j);
      for (std::size_t locked : o.locked) {
        pool.refresh(locked);
        for (std::size_t j : g.neighbors(locked)) pool.refresh(j);
      }
    }
    return result;
  }

  // Synchronous: every enabled node moves on the same snapshot; locks land after own updates.
  std::vector<std::size_t> order(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return value(g.node(a).id) < value(g.node(b).id); });
  for (;;) {
    std::vector<Outcome> moves;
    for (std::size_t k : order) {
      const RuleSet rules = enabled_rules_at(g, k);
      if (!rules.empty()) moves.push_back(compute_move(g, k, preferred(rules, cfg.priority)));
    }
    if (moves.empty()) return result;
    if (result.steps >= cfg.max_steps) {
      result.termination = Termination::StepLimit;
      return result;
    }
    const std::size_t round = first_step + result.steps;
    for (const Outcome& o : moves) result.trace.push_back(make_record(g, o, round));
    for (const Outcome& o : moves) commit(g, o);
    for (const Outcome& o : moves) commit_locks(g, o);
    ++result.steps;
  }
}

// ---------------------------------------------------------------------------------------------
// Analysis

LegitimacyReport check_legitimate(const ProtocolGraph& g) {
  LegitimacyReport report;
  for (const ProtocolNode& n : g.nodes()) {
    if (n.state == NodeState::Working && n.compartment == Compartment::R) {
      report.legitimate = false;
      report.violations.push_back({n.id, n.state, n.compartment});
    }
  }
  return report;
}

std::vector<NodeClass> classify_nodes(const ProtocolGraph& g) {
  std::vector<NodeClass> out(g.size(), NodeClass::Unclassified);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const bool working_neighbour = predicates_at(g, k).working;
    const NodeState s = g.node(k).state;
    if (s == NodeState::Working) {
      if (!working_neighbour) out[k] = NodeClass::Independent;
    } else if (working_neighbour) {
      out[k] = NodeClass::Dominated;
    } else if (s == NodeState::Locked) {
      out[k] = NodeClass::LockedClass;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Attacks and lifecycle

AttackResult inject_attack(ProtocolGraph& g, std::span<const NodeId> targets) {
  AttackResult result;
  for (NodeId id : targets) {
    ProtocolNode& n = g.node(id);
    if (n.compartment == Compartment::I) {
      n.compartment = Compartment::R;
      result.attacked.push_back(id);
    } else {
      result.ignored.push_back(id);
    }
  }
  return result;
}

AttackResult inject_attack(ProtocolGraph& g, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<NodeId> targets;
  for (const ProtocolNode& n : g.nodes()) {
    if (n.compartment == Compartment::I && u(rng) < rate) targets.push_back(n.id);
  }
  return inject_attack(g, targets);
}

LifecycleClock::LifecycleClock(const ProtocolGraph& g) : seen_(g.size()), ticks_(g.size(), 0) {
  for (std::size_t k = 0; k < g.size(); ++k) seen_[k] = g.node(k).state;
}

std::vector<Transition> LifecycleClock::heal_and_wake(ProtocolGraph& g, const LifecycleConfig& cfg) {
  std::vector<Transition> out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    ProtocolNode& n = g.node(k);
    if (n.state != seen_[k]) {
      seen_[k] = n.state;
      ticks_[k] = 0;
    }
    bool moved = false;
    if (n.state == NodeState::Locked && ticks_[k] >= cfg.heal_after) {
      n.state = NodeState::Sleeping;
      n.compartment = Compartment::S;
      out.push_back({n.id, TransitionKind::Healed});
      moved = true;
    } else if (n.state == NodeState::Sleeping && cfg.probe_after && ticks_[k] >= *cfg.probe_after) {
      n.state = NodeState::Probing;
      out.push_back({n.id, TransitionKind::Woken});
      moved = true;
    }
    if (moved) {
      seen_[k] = n.state;
      ticks_[k] = 0;
    } else {
      ++ticks_[k];
    }
  }
  return out;
}

void seed_informed(ProtocolGraph& g, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.node(k).compartment = u(rng) < fraction ? Compartment::I : Compartment::S;
  }
}

}  // namespace uwsn
