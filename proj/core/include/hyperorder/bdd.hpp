#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperorder/cnf.hpp"

namespace hyperorder {

/// Handle to a node inside one BddManager. Handles are meaningless across
/// managers.
struct NodeId {
  std::uint32_t handle = 0;

  constexpr auto operator<=>(const NodeId&) const = default;
};

inline constexpr NodeId kFalse{0};
inline constexpr NodeId kTrue{1};

enum class BoolOp : std::uint8_t { And, Or };

/// Variable order, top level first.
using Order = std::vector<VarId>;

Order identity_order(std::uint32_t num_vars);

/// Throws std::invalid_argument unless `order` is a permutation of 1..num_vars.
void validate_order(std::uint32_t num_vars, std::span<const VarId> order);

/// Reduced ordered BDD store. Every node is created through the unique table,
/// so the store is reduced and canonical at all times.
///
/// Nodes record their variable, not their level; the level of a variable is
/// looked up in the current order. An adjacent-level swap rewrites the affected
/// nodes in place, so every handle keeps denoting the same function across
/// reordering and the operation caches stay valid.
///
/// Single-threaded. Nodes are never freed; a manager is meant to live for one
/// task.
class BddManager {
 public:
  BddManager(std::uint32_t num_vars, Order order);
  explicit BddManager(std::uint32_t num_vars) : BddManager(num_vars, identity_order(num_vars)) {}

  std::uint32_t num_vars() const { return num_vars_; }
  const Order& order() const { return order_; }
  std::uint32_t level_of(VarId var) const { return level_of_var_[var.index]; }
  VarId var_at(std::uint32_t level) const { return order_[level]; }

  bool is_terminal(NodeId f) const { return f.handle < 2; }
  /// Terminals sit at level num_vars().
  std::uint32_t level(NodeId f) const;
  VarId var(NodeId f) const;
  NodeId low(NodeId f) const;
  NodeId high(NodeId f) const;

  /// Unique-table constructor. Returns `low` when low == high; throws when a
  /// child is not strictly below `level`.
  NodeId make_node(std::uint32_t level, NodeId low, NodeId high);

  NodeId variable(VarId var);
  NodeId literal(Literal lit);

  NodeId apply(BoolOp op, NodeId f, NodeId g);
  NodeId bdd_and(NodeId f, NodeId g) { return apply(BoolOp::And, f, g); }
  NodeId bdd_or(NodeId f, NodeId g) { return apply(BoolOp::Or, f, g); }
  NodeId negate(NodeId f);

  NodeId build_clause(const Clause& clause);
  /// Conjunction of the clauses, combined as a balanced binary tree.
  NodeId build_cnf(const Cnf& cnf);

  /// Number of distinct nodes reachable from `root`, terminals included.
  std::size_t size(NodeId root) const;
  /// Reachable non-terminal nodes per level.
  std::vector<std::size_t> level_profile(NodeId root) const;

  /// assignment[i] is the value of variable i+1.
  bool eval(NodeId root, const std::vector<bool>& assignment) const;

  /// Exchanges the variables at `level` and `level + 1`.
  void swap_adjacent(std::uint32_t level);
  /// Realizes `order` through adjacent swaps.
  void reorder_to(std::span<const VarId> order);

  /// Keeps only the nodes reachable from `roots`, renumbers them and rewrites
  /// `roots` in place. Operation caches are cleared; every other handle is
  /// invalidated.
  void collect_garbage(std::span<NodeId> roots);

  /// Drops every node and cache entry and installs a new order.
  void reset(Order order);

  /// Stored nodes including terminals and unreachable ones.
  std::size_t store_size() const { return nodes_.size(); }
  std::size_t swap_count() const { return swaps_; }

  /// Reducedness, orderedness and unique-table consistency over the whole
  /// store. Meant for tests.
  bool check_invariants() const;

  /// Graphviz rendering: dotted low edges, solid high edges.
  std::string to_dot(NodeId root) const;

 private:
  struct Node {
    std::uint32_t var;  // 0 for terminals
    std::uint32_t low;
    std::uint32_t high;
  };

  static std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  void check_handle(NodeId f) const;
  std::uint32_t node_level(std::uint32_t handle) const;
  std::uint32_t mk(std::uint32_t var, std::uint32_t low, std::uint32_t high);
  std::uint32_t apply_rec(BoolOp op, std::uint32_t f, std::uint32_t g);
  std::uint32_t negate_rec(std::uint32_t f);
  NodeId build_range(const Cnf& cnf, std::size_t begin, std::size_t end);
  template <class Visit>
  void traverse(NodeId root, Visit&& visit) const;

  std::uint32_t num_vars_;
  Order order_;
  std::vector<std::uint32_t> level_of_var_;  // indexed by VarId::index
  std::vector<Node> nodes_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> unique_;  // per variable
  std::unordered_map<std::uint64_t, std::uint32_t> and_cache_;
  std::unordered_map<std::uint64_t, std::uint32_t> or_cache_;
  std::unordered_map<std::uint32_t, std::uint32_t> not_cache_;
  mutable std::vector<std::uint32_t> mark_;
  mutable std::uint32_t mark_epoch_ = 0;
  std::size_t swaps_ = 0;
};

/// An ordered BDD that need not be reduced. Entries 0 and 1 of `nodes` are the
/// FALSE and TRUE terminals (their fields are ignored); children index `nodes`.
struct UnreducedBdd {
  struct Node {
    std::uint32_t level = 0;
    std::size_t low = 0;
    std::size_t high = 0;
  };
  std::vector<Node> nodes{Node{}, Node{}};
  std::size_t root = 0;
};

/// Classical reduce: imports an arbitrary ordered BDD into `mgr` (whose order
/// gives the level meaning), merging isomorphic subgraphs and removing
/// redundant tests.
NodeId reduce(BddManager& mgr, const UnreducedBdd& bdd);

/// Order files: one VarId per line, top level first. Blank lines and lines
/// starting with '#' are ignored.
Order parse_order(const std::string& text);
std::string format_order(std::span<const VarId> order);
Order read_order_file(const std::string& path);
void write_order_file(const std::string& path, std::span<const VarId> order);

}  // namespace hyperorder
