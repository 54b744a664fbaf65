#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperorder/bdd.hpp"
#include "hyperorder/cnf.hpp"

namespace hyperorder {

/// Hypergraph node: variable v is node v, the padding node is node 0.
struct HNode {
  std::uint32_t id = 0;

  static constexpr HNode bottom() { return {0}; }
  static constexpr HNode of(VarId v) { return {v.index}; }
  constexpr bool is_bottom() const { return id == 0; }
  constexpr VarId var() const { return VarId{id}; }

  constexpr auto operator<=>(const HNode&) const = default;
};

enum class Sign : std::int8_t { Neg = -1, Zero = 0, Pos = 1 };

/// Three signs over {+, -, 0}. Used both for the clause type of a hyperedge
/// and for the focus-centred key that selects a message matrix.
struct SignTriple {
  std::array<Sign, 3> s{Sign::Zero, Sign::Zero, Sign::Zero};

  /// Dense code in [0, 27).
  int code() const;
  static SignTriple from_code(int code);
  /// E.g. "+-0".
  std::string str() const;
  static SignTriple parse(std::string_view text);

  constexpr auto operator<=>(const SignTriple&) const = default;
};

inline constexpr int kSignTripleCodes = 27;

struct HyperEdge {
  std::array<HNode, 3> nodes{};
  SignTriple type;

  constexpr auto operator<=>(const HyperEdge&) const = default;
};

struct Hypergraph3 {
  std::uint32_t num_vars = 0;
  std::vector<HyperEdge> edges;

  /// Variables plus the padding node.
  std::uint32_t node_count() const { return num_vars + 1; }
};

/// One hyperedge per clause, shorter clauses padded with the bottom node and
/// sign 0; repeated (nodes, type) edges are dropped.
Hypergraph3 cnf_to_hypergraph(const Cnf& cnf);

/// Handcrafted one-hot features from the occurrence ranking: variables sorted
/// by occurrences (desc), positive occurrences (desc), then VarId.
class FeatureAssignment {
 public:
  FeatureAssignment(std::vector<std::uint32_t> rank, std::uint32_t d_feat);

  std::uint32_t d_feat() const { return d_feat_; }
  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(rank_.size()); }
  std::uint32_t rank(VarId v) const { return rank_.at(v.index - 1); }
  /// Zero for the bottom node and for ranks >= d_feat.
  std::vector<double> feature(HNode node) const;
  /// Variables sorted by rank.
  Order frequency_order() const;

 private:
  std::vector<std::uint32_t> rank_;
  std::uint32_t d_feat_;
};

FeatureAssignment feature_rank(const Cnf& cnf, std::uint32_t d_feat = 64);

/// The frequency order used as the initial order for measurements.
Order frequency_order(const Cnf& cnf);

/// One (left, right) pair of NBR_H(focus) together with the focus-centred key
/// (sign of left, focus, right) and the originating edge.
struct NeighborPair {
  HNode left;
  HNode right;
  SignTriple key;
  std::uint32_t edge = 0;
};

/// Cyclic (predecessor, successor) pairs of `v` over all edge positions it
/// occupies, in edge-list order.
std::vector<NeighborPair> nbr_h(const Hypergraph3& hg, HNode v);

/// nbr_h for every node, indexed by node id.
std::vector<std::vector<NeighborPair>> neighbor_table(const Hypergraph3& hg);

std::vector<HNode> nbr_l(const Hypergraph3& hg, HNode v);
std::vector<HNode> nbr_r(const Hypergraph3& hg, HNode v);

enum class BlockSide : std::uint8_t { Left, Right };

struct DerivedArc {
  HNode from;
  HNode to;
  SignTriple key;  // receiver's focus-centred key
  std::uint32_t edge = 0;
};

struct DerivedGraph {
  BlockSide side = BlockSide::Left;
  std::vector<DerivedArc> arcs;

  std::vector<HNode> in_neighbors(HNode v) const;
};

/// The derived graph (arcs (i,j), (j,k), (k,i) per edge, left blocks) and its
/// reverse (right blocks).
std::pair<DerivedGraph, DerivedGraph> derived_graphs(const Hypergraph3& hg);

/// One line per edge, "a b c TYPE", bottom printed as 0.
std::string dump(const Hypergraph3& hg);

}  // namespace hyperorder
