#pragma once

// Three-rule distributed scheduling of working / probing / sleeping / locked sensors.
//
// r1: probing node with a working neighbour copies the datum (if that neighbour holds it) and
//     goes to sleep.
// r2: probing node with no working and no lower-id probing neighbour, or with an attacked
//     neighbour, locks its attacked neighbours and starts working.
// r3: working node with a lower-id working neighbour copies the datum and goes to sleep.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uwsn/error.hpp"

namespace uwsn {

enum class NodeId : std::uint64_t {};

constexpr std::uint64_t value(NodeId id) { return static_cast<std::uint64_t>(id); }

enum class NodeState : std::uint8_t { Working, Probing, Sleeping, Locked };
enum class Compartment : std::uint8_t { S, I, R };
enum class Rule : std::uint8_t { R1, R2, R3 };

std::string_view to_string(NodeState s);
std::string_view to_string(Compartment c);
std::string_view to_string(Rule r);
NodeState parse_node_state(std::string_view s);
Compartment parse_compartment(std::string_view s);

struct ProtocolNode {
  NodeId id{};
  NodeState state = NodeState::Probing;
  Compartment compartment = Compartment::S;
};

/// Undirected simple graph of protocol nodes; ids unique, adjacency symmetric, no self-loops.
class ProtocolGraph {
 public:
  /// Returns the dense index of the new node. Throws ProtocolError on a duplicate id.
  std::size_t add_node(NodeId id, NodeState state = NodeState::Probing,
                       Compartment compartment = Compartment::S);
  /// Adds both endpoints if missing. Duplicate edges are ignored; self-loops throw.
  void add_edge(NodeId u, NodeId v);

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::size_t edge_count() const;

  std::optional<std::size_t> find(NodeId id) const;
  /// Throws ProtocolError for an unknown id.
  std::size_t index_of(NodeId id) const;

  ProtocolNode& node(std::size_t index) { return nodes_[index]; }
  const ProtocolNode& node(std::size_t index) const { return nodes_[index]; }
  ProtocolNode& node(NodeId id) { return nodes_[index_of(id)]; }
  const ProtocolNode& node(NodeId id) const { return nodes_[index_of(id)]; }

  std::span<const ProtocolNode> nodes() const { return nodes_; }
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_[index]; }

  /// Every node back to (Probing, S).
  void reset_states();

 private:
  std::vector<ProtocolNode> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct Predicates {
  bool attacked = false;       ///< A: some neighbour has compartment R
  bool working = false;        ///< W: some neighbour is working
  bool working_lower = false;  ///< W*: some working neighbour has a smaller id
  bool probing_lower = false;  ///< P*: some probing neighbour has a smaller id

  friend bool operator==(const Predicates&, const Predicates&) = default;
};

Predicates predicates(const ProtocolGraph& g, NodeId id);
Predicates predicates_at(const ProtocolGraph& g, std::size_t index);

class RuleSet {
 public:
  constexpr RuleSet() = default;
  constexpr RuleSet(std::initializer_list<Rule> rules) {
    for (Rule r : rules) insert(r);
  }

  constexpr void insert(Rule r) { bits_ |= bit(r); }
  constexpr bool contains(Rule r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return std::size_t(bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }

  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  static constexpr std::uint8_t bit(Rule r) { return std::uint8_t(1u << static_cast<unsigned>(r)); }
  std::uint8_t bits_ = 0;
};

RuleSet enabled_rules(const ProtocolGraph& g, NodeId id);
RuleSet enabled_rules_at(const ProtocolGraph& g, std::size_t index);

/// Which rule a node fires when more than one is enabled (only r1 and r2 can overlap, when the
/// node has both a working and an attacked neighbour).
enum class RulePriority {
  Listed,          ///< r1 > r2 > r3
  AttackOverride,  ///< r2 > r1 > r3: an attacked neighbour is always quarantined
};

std::string_view to_string(RulePriority p);
RulePriority parse_rule_priority(std::string_view s);

/// Highest-priority rule of a non-empty set.
Rule preferred(RuleSet rules, RulePriority priority);

struct MoveRecord {
  std::size_t step = 0;
  NodeId node{};
  Rule rule = Rule::R1;
  NodeState state_before = NodeState::Probing;
  NodeState state_after = NodeState::Probing;
  Compartment compartment_before = Compartment::S;
  Compartment compartment_after = Compartment::S;
  std::vector<NodeId> locked;  ///< neighbours locked by an r2 move
};

using MoveTrace = std::vector<MoveRecord>;

/// Executes `rule` at `id`. Throws ProtocolError when the rule is not enabled.
MoveRecord apply_rule(ProtocolGraph& g, NodeId id, Rule rule, std::size_t step = 0);

enum class Daemon { Central, Synchronous };
enum class TieBreak { LowestId, SeededRandom };

std::string_view to_string(Daemon d);
std::string_view to_string(TieBreak t);
Daemon parse_daemon(std::string_view s);
TieBreak parse_tie_break(std::string_view s);

struct SchedulerConfig {
  Daemon daemon = Daemon::Central;
  TieBreak tie_break = TieBreak::LowestId;
  RulePriority priority = RulePriority::Listed;
  std::uint64_t seed = 1;
  std::size_t max_steps = 1'000'000;
};

enum class Termination { Quiescent, StepLimit };

struct SchedulerResult {
  Termination termination = Termination::Quiescent;
  std::size_t steps = 0;  ///< central: moves; synchronous: rounds
  MoveTrace trace;
};

/// Runs rules until none is enabled or max_steps is reached. Move step numbers start at
/// `first_step`. Central executes one move per step; Synchronous fires every enabled node on
/// the pre-step snapshot.
SchedulerResult run_scheduler(ProtocolGraph& g, const SchedulerConfig& cfg, std::size_t first_step = 1);

struct Violation {
  NodeId node{};
  NodeState state = NodeState::Working;
  Compartment compartment = Compartment::R;
};

struct LegitimacyReport {
  bool legitimate = true;
  std::vector<Violation> violations;
};

/// Legitimate iff every working node holds compartment S or I.
LegitimacyReport check_legitimate(const ProtocolGraph& g);

enum class NodeClass { Independent, Dominated, LockedClass, Unclassified };

std::string_view to_string(NodeClass c);

/// Independent: working with no working neighbour. Dominated: not working, with a working
/// neighbour. LockedClass: locked without a working neighbour. Anything else is Unclassified.
std::vector<NodeClass> classify_nodes(const ProtocolGraph& g);

struct AttackResult {
  std::vector<NodeId> attacked;
  std::vector<NodeId> ignored;  ///< targets that were not in compartment I
};

/// Destroys the datum (I -> R) on the targets; states are left as they are.
AttackResult inject_attack(ProtocolGraph& g, std::span<const NodeId> targets);
/// Attacks each I node independently with probability `rate`.
AttackResult inject_attack(ProtocolGraph& g, double rate, std::uint64_t seed);

struct LifecycleConfig {
  std::size_t heal_after = 0;               ///< ticks a node stays locked
  std::optional<std::size_t> probe_after;   ///< ticks a node sleeps before probing; empty: never
};

enum class TransitionKind { Healed, Woken };

struct Transition {
  NodeId node{};
  TransitionKind kind = TransitionKind::Healed;
};

/// Tracks how many ticks every node has spent in its current state.
class LifecycleClock {
 public:
  explicit LifecycleClock(const ProtocolGraph& g);

  /// One tick: locked nodes past heal_after become (Sleeping, S); sleeping nodes past
  /// probe_after become Probing. State changes made by rules since the last tick restart the
  /// node's counter.
  std::vector<Transition> heal_and_wake(ProtocolGraph& g, const LifecycleConfig& cfg);

 private:
  std::vector<NodeState> seen_;
  std::vector<std::size_t> ticks_;
};

/// Marks each node informed with probability `fraction` (others S); states untouched.
void seed_informed(ProtocolGraph& g, double fraction, std::uint64_t seed);

}  // namespace uwsn
