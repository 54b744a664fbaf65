#include "hyperorder/hypergraph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hyperorder {

int SignTriple::code() const {
  int c = 0;
  for (Sign x : s) c = c * 3 + (static_cast<int>(x) + 1);
  return c;
}

SignTriple SignTriple::from_code(int code) {
  if (code < 0 || code >= kSignTripleCodes) throw std::out_of_range("sign code out of range");
  SignTriple t;
  for (int i = 2; i >= 0; --i) {
    t.s[static_cast<std::size_t>(i)] = static_cast<Sign>(code % 3 - 1);
    code /= 3;
  }
  return t;
}

std::string SignTriple::str() const {
  std::string out;
  for (Sign x : s) out += x == Sign::Pos ? '+' : x == Sign::Neg ? '-' : '0';
  return out;
}

SignTriple SignTriple::parse(std::string_view text) {
  if (text.size() != 3) throw std::invalid_argument("sign triple must have 3 characters");
  SignTriple t;
  for (std::size_t i = 0; i < 3; ++i) {
    switch (text[i]) {
      case '+': t.s[i] = Sign::Pos; break;
      case '-': t.s[i] = Sign::Neg; break;
      case '0': t.s[i] = Sign::Zero; break;
      default: throw std::invalid_argument("bad sign character in '" + std::string(text) + "'");
    }
  }
  return t;
}

Hypergraph3 cnf_to_hypergraph(const Cnf& cnf) {
  Hypergraph3 hg;
  hg.num_vars = cnf.num_vars;
  std::set<HyperEdge> seen;
  for (const auto& clause : cnf.clauses) {
    if (clause.empty() || clause.size() > 3) {
      throw std::invalid_argument("hypergraph encoding needs clauses of 1-3 literals");
    }
    HyperEdge e;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      e.nodes[i] = HNode::of(clause[i].var());
      e.type.s[i] = clause[i].positive() ? Sign::Pos : Sign::Neg;
    }
    if (seen.insert(e).second) hg.edges.push_back(e);
  }
  return hg;
}

FeatureAssignment::FeatureAssignment(std::vector<std::uint32_t> rank, std::uint32_t d_feat)
    : rank_(std::move(rank)), d_feat_(d_feat) {
  std::vector<bool> hit(rank_.size(), false);
  for (auto r : rank_) {
    if (r >= rank_.size() || hit[r]) throw std::invalid_argument("rank must be a bijection");
    hit[r] = true;
  }
}

std::vector<double> FeatureAssignment::feature(HNode node) const {
  std::vector<double> a(d_feat_, 0.0);
  if (!node.is_bottom()) {
    const std::uint32_t r = rank(node.var());
    if (r < d_feat_) a[r] = 1.0;
  }
  return a;
}

Order FeatureAssignment::frequency_order() const {
  Order order(rank_.size());
  for (std::size_t i = 0; i < rank_.size(); ++i) {
    order[rank_[i]] = VarId{static_cast<std::uint32_t>(i + 1)};
  }
  return order;
}

FeatureAssignment feature_rank(const Cnf& cnf, std::uint32_t d_feat) {
  const std::uint32_t n = cnf.num_vars;
  std::vector<std::uint32_t> total(n + 1, 0), positive(n + 1, 0);
  for (const auto& clause : cnf.clauses) {
    for (const auto& lit : clause) {
      ++total[lit.var().index];
      if (lit.positive()) ++positive[lit.var().index];
    }
  }
  std::vector<std::uint32_t> vars(n);
  std::iota(vars.begin(), vars.end(), 1u);
  std::sort(vars.begin(), vars.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (total[a] != total[b]) return total[a] > total[b];
    if (positive[a] != positive[b]) return positive[a] > positive[b];
    return a < b;
  });
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t pos = 0; pos < n; ++pos) rank[vars[pos] - 1] = pos;
  return FeatureAssignment(std::move(rank), d_feat);
}

Order frequency_order(const Cnf& cnf) { return feature_rank(cnf, 0).frequency_order(); }

namespace {

NeighborPair pair_at(const HyperEdge& e, std::size_t pos, std::uint32_t edge) {
  const std::size_t l = (pos + 2) % 3, r = (pos + 1) % 3;
  NeighborPair p;
  p.left = e.nodes[l];
  p.right = e.nodes[r];
  p.key.s = {e.type.s[l], e.type.s[pos], e.type.s[r]};
  p.edge = edge;
  return p;
}

}  // namespace

std::vector<std::vector<NeighborPair>> neighbor_table(const Hypergraph3& hg) {
  std::vector<std::vector<NeighborPair>> table(hg.node_count());
  for (std::uint32_t ei = 0; ei < hg.edges.size(); ++ei) {
    const auto& e = hg.edges[ei];
    for (std::size_t pos = 0; pos < 3; ++pos) {
      const HNode focus = e.nodes[pos];
      if (focus.id >= table.size()) throw std::out_of_range("edge mentions unknown node");
      table[focus.id].push_back(pair_at(e, pos, ei));
    }
  }
  return table;
}

std::vector<NeighborPair> nbr_h(const Hypergraph3& hg, HNode v) {
  std::vector<NeighborPair> out;
  for (std::uint32_t ei = 0; ei < hg.edges.size(); ++ei) {
    for (std::size_t pos = 0; pos < 3; ++pos) {
      if (hg.edges[ei].nodes[pos] == v) out.push_back(pair_at(hg.edges[ei], pos, ei));
    }
  }
  return out;
}

std::vector<HNode> nbr_l(const Hypergraph3& hg, HNode v) {
  std::vector<HNode> out;
  for (const auto& p : nbr_h(hg, v)) out.push_back(p.left);
  return out;
}

std::vector<HNode> nbr_r(const Hypergraph3& hg, HNode v) {
  std::vector<HNode> out;
  for (const auto& p : nbr_h(hg, v)) out.push_back(p.right);
  return out;
}

std::vector<HNode> DerivedGraph::in_neighbors(HNode v) const {
  std::vector<HNode> out;
  for (const auto& a : arcs)
    if (a.to == v) out.push_back(a.from);
  return out;
}

std::pair<DerivedGraph, DerivedGraph> derived_graphs(const Hypergraph3& hg) {
  DerivedGraph forward{BlockSide::Left, {}};
  DerivedGraph reverse{BlockSide::Right, {}};
  for (std::uint32_t ei = 0; ei < hg.edges.size(); ++ei) {
    const auto& e = hg.edges[ei];
    // (i,j), (j,k), (k,i): the receivers are positions 1, 2, 0.
    for (std::size_t pos : {1u, 2u, 0u}) {
      const NeighborPair p = pair_at(e, pos, ei);
      forward.arcs.push_back({p.left, e.nodes[pos], p.key, ei});
    }
    // Reversed arcs (j,i), (k,j), (i,k): receivers at positions 0, 1, 2.
    for (std::size_t pos : {0u, 1u, 2u}) {
      const NeighborPair p = pair_at(e, pos, ei);
      reverse.arcs.push_back({p.right, e.nodes[pos], p.key, ei});
    }
  }
  return {std::move(forward), std::move(reverse)};
}

std::string dump(const Hypergraph3& hg) {
  std::string out;
  for (const auto& e : hg.edges) {
    for (const auto& n : e.nodes) out += std::to_string(n.id) + " ";
    out += e.type.str() + "\n";
  }
  return out;
}

}  // namespace hyperorder
