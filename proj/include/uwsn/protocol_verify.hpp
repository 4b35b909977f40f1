#pragma once

// Empirical checks of the convergence lemmas over recorded executions.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "uwsn/protocol.hpp"

namespace uwsn {

enum class HistoryKind { Move, Attack, Heal, Wake };

struct HistoryEvent {
  HistoryKind kind = HistoryKind::Move;
  NodeId node{};
  std::size_t move = 0;  ///< index into History::moves for Move events
};

/// Interleaved record of rule executions and external events (attacks, heals, wake-ups).
struct History {
  MoveTrace moves;
  std::vector<HistoryEvent> events;

  void append(const MoveTrace& trace);
  void append(const AttackResult& attack);
  void append(const std::vector<Transition>& transitions);
  std::size_t wake_count() const;
};

struct LemmaViolation {
  NodeId node{};
  std::size_t step = 0;  ///< step of the offending move
  std::string detail;
};

/// After an r2 move, the node makes no further move unless an attack has hit its closed
/// neighbourhood in between.
std::vector<LemmaViolation> scan_lemma1(const ProtocolGraph& g, const History& h);
/// After an r2 move, each neighbour makes at most one move before it is next woken, and that
/// move is r1.
std::vector<LemmaViolation> scan_lemma2(const ProtocolGraph& g, const History& h);
/// Between consecutive probing activations a node makes at most 2 moves; two moves are one r2
/// and one r3.
std::vector<LemmaViolation> scan_lemma4(const ProtocolGraph& g, const History& h);
/// Nodes classified Unclassified (empty at quiescence).
std::vector<NodeId> scan_lemma3(const ProtocolGraph& g);

struct AttackCycleConfig {
  SchedulerConfig scheduler;
  std::size_t cycles = 3;
  double attack_rate = 0.3;
  LifecycleConfig lifecycle{2, 3};
  std::size_t ticks_per_cycle = 8;
  std::uint64_t seed = 1;
};

struct QuiescenceCheck {
  std::size_t quiescent_points = 0;
  std::size_t unclassified_points = 0;  ///< quiescent points with an Unclassified node
  std::size_t illegitimate_points = 0;  ///< quiescent points failing check_legitimate
};

struct AttackCycleRun {
  History history;
  bool step_limit = false;
  QuiescenceCheck checks;
};

/// Converge, then `cycles` times: attack, and for `ticks_per_cycle` ticks heal/wake + converge.
/// Ends with a settle phase (heal every locked node, wake every sleeper once, converge).
AttackCycleRun run_attack_cycles(ProtocolGraph& g, const AttackCycleConfig& cfg);

struct VerificationVerdict {
  std::size_t nodes = 0;
  std::size_t moves = 0;
  std::size_t move_bound = 0;  ///< 2 * (n + wake-ups)
  bool quiescent = true;
  bool legitimate = true;
  std::vector<LemmaViolation> lemma1, lemma2, lemma4;
  std::vector<NodeId> lemma3;

  bool within_bound() const { return moves <= move_bound; }
  bool lemmas_hold() const { return lemma1.empty() && lemma2.empty() && lemma4.empty() && lemma3.empty(); }
  bool passed() const { return quiescent && within_bound() && legitimate && lemmas_hold(); }
};

/// Verdicts for a finished execution whose final configuration is `g`.
VerificationVerdict verify(const ProtocolGraph& g, const History& h, bool quiescent);

struct ExhaustiveResult {
  std::size_t reachable = 0;            ///< reachable configurations
  std::size_t quiescent = 0;            ///< reachable quiescent configurations
  std::size_t max_moves = 0;            ///< longest schedule to quiescence
  bool lemma3_everywhere = true;        ///< no Unclassified node in any quiescent configuration
  bool legitimate_everywhere = true;
};

/// Explores every central-daemon schedule (every enabled node/rule pair at every step) from the
/// current configuration. Attack-free; intended for small graphs (n <= 8).
ExhaustiveResult explore_all_schedules(const ProtocolGraph& g);

/// Calls fn for every connected labelled graph on n nodes (ids 1..n).
void for_each_connected_graph(std::size_t n, const std::function<void(const ProtocolGraph&)>& fn);

/// Random connected graph: random spanning tree plus each remaining pair with `extra_edge_prob`.
/// Ids are a random permutation of 1..n when `permute_ids`, else 1..n in creation order.
ProtocolGraph random_connected_graph(std::size_t n, double extra_edge_prob, std::mt19937_64& rng,
                                     bool permute_ids = true);

}  // namespace uwsn
