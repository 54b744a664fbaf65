#include "hyperorder/bdd.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hyperorder/error.hpp"

namespace hyperorder {

Order identity_order(std::uint32_t num_vars) {
  Order order(num_vars);
  for (std::uint32_t i = 0; i < num_vars; ++i) order[i] = VarId{i + 1};
  return order;
}

void validate_order(std::uint32_t num_vars, std::span<const VarId> order) {
  if (order.size() != num_vars) {
    throw std::invalid_argument("order has " + std::to_string(order.size()) + " entries, expected " +
                                std::to_string(num_vars));
  }
  std::vector<bool> seen(num_vars + 1, false);
  for (VarId v : order) {
    if (v.index < 1 || v.index > num_vars) {
      throw std::invalid_argument("order mentions variable " + std::to_string(v.index) +
                                  " outside 1.." + std::to_string(num_vars));
    }
    if (seen[v.index]) {
      throw std::invalid_argument("order repeats variable " + std::to_string(v.index));
    }
    seen[v.index] = true;
  }
}

BddManager::BddManager(std::uint32_t num_vars, Order order) : num_vars_(num_vars) {
  reset(std::move(order));
}

void BddManager::reset(Order order) {
  validate_order(num_vars_, order);
  order_ = std::move(order);
  level_of_var_.assign(num_vars_ + 1, num_vars_);
  for (std::uint32_t l = 0; l < num_vars_; ++l) level_of_var_[order_[l].index] = l;
  nodes_.clear();
  nodes_.push_back({0, 0, 0});
  nodes_.push_back({0, 1, 1});
  unique_.assign(num_vars_ + 1, {});
  and_cache_.clear();
  or_cache_.clear();
  not_cache_.clear();
  mark_.clear();
  mark_epoch_ = 0;
  swaps_ = 0;
}

void BddManager::check_handle(NodeId f) const {
  if (f.handle >= nodes_.size()) {
    throw std::invalid_argument("node handle " + std::to_string(f.handle) +
                                " does not belong to this manager");
  }
}

std::uint32_t BddManager::node_level(std::uint32_t handle) const {
  return handle < 2 ? num_vars_ : level_of_var_[nodes_[handle].var];
}

std::uint32_t BddManager::level(NodeId f) const {
  check_handle(f);
  return node_level(f.handle);
}

VarId BddManager::var(NodeId f) const {
  check_handle(f);
  return VarId{nodes_[f.handle].var};
}

NodeId BddManager::low(NodeId f) const {
  check_handle(f);
  return NodeId{nodes_[f.handle].low};
}

NodeId BddManager::high(NodeId f) const {
  check_handle(f);
  return NodeId{nodes_[f.handle].high};
}

std::uint32_t BddManager::mk(std::uint32_t var, std::uint32_t low, std::uint32_t high) {
  if (low == high) return low;
  auto& table = unique_[var];
  const auto key = pair_key(low, high);
  if (auto it = table.find(key); it != table.end()) return it->second;
  const auto handle = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({var, low, high});
  table.emplace(key, handle);
  return handle;
}

NodeId BddManager::make_node(std::uint32_t level, NodeId low, NodeId high) {
  if (level >= num_vars_) throw std::out_of_range("level " + std::to_string(level) + " out of range");
  check_handle(low);
  check_handle(high);
  if (node_level(low.handle) <= level || node_level(high.handle) <= level) {
    throw std::invalid_argument("make_node: children must lie strictly below level " +
                                std::to_string(level));
  }
  return NodeId{mk(order_[level].index, low.handle, high.handle)};
}

NodeId BddManager::variable(VarId v) {
  if (v.index < 1 || v.index > num_vars_) {
    throw std::out_of_range("variable " + std::to_string(v.index) + " out of range");
  }
  return NodeId{mk(v.index, kFalse.handle, kTrue.handle)};
}

NodeId BddManager::literal(Literal lit) {
  if (lit.var().index < 1 || lit.var().index > num_vars_) {
    throw std::out_of_range("variable " + std::to_string(lit.var().index) + " out of range");
  }
  return lit.positive() ? NodeId{mk(lit.var().index, 0, 1)} : NodeId{mk(lit.var().index, 1, 0)};
}

std::uint32_t BddManager::apply_rec(BoolOp op, std::uint32_t f, std::uint32_t g) {
  if (op == BoolOp::And) {
    if (f == 0 || g == 0) return 0;
    if (f == 1) return g;
    if (g == 1) return f;
  } else {
    if (f == 1 || g == 1) return 1;
    if (f == 0) return g;
    if (g == 0) return f;
  }
  if (f == g) return f;
  if (f > g) std::swap(f, g);

  auto& cache = op == BoolOp::And ? and_cache_ : or_cache_;
  const auto key = pair_key(f, g);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const std::uint32_t lf = level_of_var_[nf.var];
  const std::uint32_t lg = level_of_var_[ng.var];
  const std::uint32_t top = std::min(lf, lg);
  const std::uint32_t f0 = lf == top ? nf.low : f, f1 = lf == top ? nf.high : f;
  const std::uint32_t g0 = lg == top ? ng.low : g, g1 = lg == top ? ng.high : g;

  const std::uint32_t r0 = apply_rec(op, f0, g0);
  const std::uint32_t r1 = apply_rec(op, f1, g1);
  const std::uint32_t r = mk(order_[top].index, r0, r1);
  (op == BoolOp::And ? and_cache_ : or_cache_).emplace(key, r);
  return r;
}

NodeId BddManager::apply(BoolOp op, NodeId f, NodeId g) {
  check_handle(f);
  check_handle(g);
  return NodeId{apply_rec(op, f.handle, g.handle)};
}

std::uint32_t BddManager::negate_rec(std::uint32_t f) {
  if (f < 2) return f ^ 1u;
  if (auto it = not_cache_.find(f); it != not_cache_.end()) return it->second;
  const Node n = nodes_[f];
  const std::uint32_t r = mk(n.var, negate_rec(n.low), negate_rec(n.high));
  not_cache_.emplace(f, r);
  return r;
}

NodeId BddManager::negate(NodeId f) {
  check_handle(f);
  return NodeId{negate_rec(f.handle)};
}

NodeId BddManager::build_clause(const Clause& clause) {
  NodeId acc = kFalse;
  for (const auto& lit : clause) acc = bdd_or(acc, literal(lit));
  return acc;
}

NodeId BddManager::build_range(const Cnf& cnf, std::size_t begin, std::size_t end) {
  if (begin == end) return kTrue;
  if (end - begin == 1) return build_clause(cnf.clauses[begin]);
  const std::size_t mid = begin + (end - begin) / 2;
  const NodeId left = build_range(cnf, begin, mid);
  const NodeId right = build_range(cnf, mid, end);
  return bdd_and(left, right);
}

NodeId BddManager::build_cnf(const Cnf& cnf) {
  if (cnf.num_vars != num_vars_) {
    throw std::invalid_argument("formula has " + std::to_string(cnf.num_vars) +
                                " variables, manager has " + std::to_string(num_vars_));
  }
  return build_range(cnf, 0, cnf.clauses.size());
}

template <class Visit>
void BddManager::traverse(NodeId root, Visit&& visit) const {
  check_handle(root);
  if (mark_.size() < nodes_.size()) mark_.resize(nodes_.size(), 0);
  if (++mark_epoch_ == 0) {
    std::fill(mark_.begin(), mark_.end(), 0);
    mark_epoch_ = 1;
  }
  std::vector<std::uint32_t> stack{root.handle};
  mark_[root.handle] = mark_epoch_;
  while (!stack.empty()) {
    const std::uint32_t h = stack.back();
    stack.pop_back();
    visit(h);
    if (h < 2) continue;
    for (std::uint32_t child : {nodes_[h].low, nodes_[h].high}) {
      if (mark_[child] != mark_epoch_) {
        mark_[child] = mark_epoch_;
        stack.push_back(child);
      }
    }
  }
}

std::size_t BddManager::size(NodeId root) const {
  std::size_t count = 0;
  traverse(root, [&](std::uint32_t) { ++count; });
  return count;
}

std::vector<std::size_t> BddManager::level_profile(NodeId root) const {
  std::vector<std::size_t> profile(num_vars_, 0);
  traverse(root, [&](std::uint32_t h) {
    if (h >= 2) ++profile[level_of_var_[nodes_[h].var]];
  });
  return profile;
}

bool BddManager::eval(NodeId root, const std::vector<bool>& assignment) const {
  check_handle(root);
  if (assignment.size() != num_vars_) throw std::invalid_argument("assignment length mismatch");
  std::uint32_t h = root.handle;
  while (h >= 2) h = assignment[nodes_[h].var - 1] ? nodes_[h].high : nodes_[h].low;
  return h == 1;
}

void BddManager::swap_adjacent(std::uint32_t level) {
  if (num_vars_ < 2 || level >= num_vars_ - 1) {
    throw std::out_of_range("swap_adjacent: level " + std::to_string(level) + " out of range");
  }
  const std::uint32_t x = order_[level].index;
  const std::uint32_t y = order_[level + 1].index;
  auto depends_on_y = [&](std::uint32_t h) { return h >= 2 && nodes_[h].var == y; };

  // x-nodes with a y-child get rewritten in place into y-nodes; the rest just
  // move down one level and keep their table entries.
  std::vector<std::uint32_t> rewrite;
  auto& ux = unique_[x];
  for (auto it = ux.begin(); it != ux.end();) {
    const Node& n = nodes_[it->second];
    if (depends_on_y(n.low) || depends_on_y(n.high)) {
      rewrite.push_back(it->second);
      it = ux.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(rewrite.begin(), rewrite.end());

  std::swap(order_[level], order_[level + 1]);
  level_of_var_[x] = level + 1;
  level_of_var_[y] = level;

  for (std::uint32_t h : rewrite) {
    const Node n = nodes_[h];
    const bool lo_y = depends_on_y(n.low), hi_y = depends_on_y(n.high);
    const std::uint32_t f00 = lo_y ? nodes_[n.low].low : n.low;
    const std::uint32_t f01 = lo_y ? nodes_[n.low].high : n.low;
    const std::uint32_t f10 = hi_y ? nodes_[n.high].low : n.high;
    const std::uint32_t f11 = hi_y ? nodes_[n.high].high : n.high;
    const std::uint32_t g0 = mk(x, f00, f10);
    const std::uint32_t g1 = mk(x, f01, f11);
    nodes_[h] = {y, g0, g1};
    unique_[y].emplace(pair_key(g0, g1), h);
  }
  ++swaps_;
}

void BddManager::collect_garbage(std::span<NodeId> roots) {
  for (NodeId r : roots) check_handle(r);
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> image(nodes_.size(), kUnset);
  image[0] = 0;
  image[1] = 1;
  std::vector<Node> kept{nodes_[0], nodes_[1]};

  // Post-order, so children are renumbered before their parents.
  std::vector<std::pair<std::uint32_t, bool>> stack;
  for (NodeId r : roots) {
    stack.push_back({r.handle, false});
    while (!stack.empty()) {
      auto [h, expanded] = stack.back();
      stack.pop_back();
      if (image[h] != kUnset) continue;
      const Node n = nodes_[h];
      if (!expanded) {
        stack.push_back({h, true});
        stack.push_back({n.low, false});
        stack.push_back({n.high, false});
        continue;
      }
      image[h] = static_cast<std::uint32_t>(kept.size());
      kept.push_back({n.var, image[n.low], image[n.high]});
    }
  }

  nodes_ = std::move(kept);
  unique_.assign(num_vars_ + 1, {});
  for (std::uint32_t h = 2; h < nodes_.size(); ++h) {
    unique_[nodes_[h].var].emplace(pair_key(nodes_[h].low, nodes_[h].high), h);
  }
  and_cache_.clear();
  or_cache_.clear();
  not_cache_.clear();
  mark_.clear();
  mark_epoch_ = 0;
  for (NodeId& r : roots) r = NodeId{image[r.handle]};
}

void BddManager::reorder_to(std::span<const VarId> target) {
  validate_order(num_vars_, target);
  for (std::uint32_t pos = 0; pos < num_vars_; ++pos) {
    std::uint32_t l = level_of_var_[target[pos].index];
    while (l > pos) {
      swap_adjacent(l - 1);
      --l;
    }
  }
}

bool BddManager::check_invariants() const {
  if (nodes_.size() < 2) return false;
  std::size_t tabled = 0;
  for (std::uint32_t v = 1; v <= num_vars_; ++v) {
    for (const auto& [key, h] : unique_[v]) {
      if (h < 2 || h >= nodes_.size()) return false;
      const Node& n = nodes_[h];
      if (n.var != v || pair_key(n.low, n.high) != key) return false;
      ++tabled;
    }
  }
  if (tabled != nodes_.size() - 2) return false;
  for (std::uint32_t h = 2; h < nodes_.size(); ++h) {
    const Node& n = nodes_[h];
    if (n.low == n.high) return false;
    const std::uint32_t l = level_of_var_[n.var];
    if (node_level(n.low) <= l || node_level(n.high) <= l) return false;
  }
  return true;
}

std::string BddManager::to_dot(NodeId root) const {
  std::ostringstream out;
  out << "digraph bdd {\n";
  std::vector<std::uint32_t> handles;
  traverse(root, [&](std::uint32_t h) { handles.push_back(h); });
  std::sort(handles.begin(), handles.end());
  for (std::uint32_t h : handles) {
    if (h < 2) {
      out << "  n" << h << " [shape=box,label=\"" << h << "\"];\n";
    } else {
      out << "  n" << h << " [shape=circle,label=\"x" << nodes_[h].var << "\"];\n";
    }
  }
  for (std::uint32_t h : handles) {
    if (h < 2) continue;
    out << "  n" << h << " -> n" << nodes_[h].low << " [style=dotted];\n";
    out << "  n" << h << " -> n" << nodes_[h].high << " [style=solid];\n";
  }
  for (std::uint32_t l = 0; l < num_vars_; ++l) {
    out << "  { rank=same;";
    for (std::uint32_t h : handles) {
      if (h >= 2 && level_of_var_[nodes_[h].var] == l) out << " n" << h << ";";
    }
    out << " }\n";
  }
  out << "}\n";
  return out.str();
}

NodeId reduce(BddManager& mgr, const UnreducedBdd& bdd) {
  const std::size_t count = bdd.nodes.size();
  if (count < 2 || bdd.root >= count) throw std::invalid_argument("reduce: malformed diagram");
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> image(count, kUnset);
  image[0] = kFalse.handle;
  image[1] = kTrue.handle;

  // Iterative post-order so deep diagrams cannot exhaust the stack.
  std::vector<std::pair<std::size_t, bool>> stack{{bdd.root, false}};
  while (!stack.empty()) {
    auto [i, expanded] = stack.back();
    stack.pop_back();
    if (image[i] != kUnset) continue;
    const auto& n = bdd.nodes[i];
    if (n.low >= count || n.high >= count) throw std::invalid_argument("reduce: dangling child");
    if (!expanded) {
      stack.push_back({i, true});
      stack.push_back({n.low, false});
      stack.push_back({n.high, false});
      continue;
    }
    image[i] = mgr.make_node(n.level, NodeId{image[n.low]}, NodeId{image[n.high]}).handle;
  }
  return NodeId{image[bdd.root]};
}

Order parse_order(const std::string& text) {
  Order order;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long v = 0;
    std::string rest;
    if (!(fields >> v) || (fields >> rest) || v < 1 || v > UINT32_MAX) {
      throw FormatError("bad order line: '" + line + "'");
    }
    order.push_back(VarId{static_cast<std::uint32_t>(v)});
  }
  return order;
}

std::string format_order(std::span<const VarId> order) {
  std::string out;
  for (VarId v : order) out += std::to_string(v.index) + "\n";
  return out;
}

Order read_order_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_order(buf.str());
}

void write_order_file(const std::string& path, std::span<const VarId> order) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << format_order(order);
}

}  // namespace hyperorder
