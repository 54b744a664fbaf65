#include <gtest/gtest.h>

#include "hyperorder/bdd.hpp"
#include "hyperorder/harness.hpp"
#include "hyperorder/random.hpp"
#include "oracles.hpp"

using namespace hyperorder;
using testsupport::truth_table;

namespace {

Order ord(std::vector<std::uint32_t> v) {
  Order o;
  for (auto i : v) o.push_back(VarId{i});
  return o;
}

// Random function over n variables built from random literals and operators.
NodeId random_function(BddManager& mgr, Rng& rng, int depth) {
  if (depth == 0) {
    const auto v = static_cast<std::uint32_t>(rng.index(mgr.num_vars())) + 1;
    return mgr.literal(Literal(VarId{v}, rng.chance(0.5)));
  }
  const NodeId a = random_function(mgr, rng, depth - 1);
  const NodeId b = random_function(mgr, rng, depth - 1);
  NodeId f = rng.chance(0.5) ? mgr.bdd_and(a, b) : mgr.bdd_or(a, b);
  return rng.chance(0.2) ? mgr.negate(f) : f;
}

}  // namespace

TEST(Manager, Orders) {
  EXPECT_EQ(BddManager(6).order(), identity_order(6));
  BddManager m(6, ord({1, 3, 5, 2, 4, 6}));
  EXPECT_EQ(m.level_of(VarId{2}), 3u);
  EXPECT_EQ(m.var_at(1), VarId{3});
  EXPECT_THROW(BddManager(2, ord({1, 1})), std::invalid_argument);
  EXPECT_THROW(BddManager(2, ord({1})), std::invalid_argument);
  EXPECT_THROW(BddManager(2, ord({1, 3})), std::invalid_argument);
}

TEST(Manager, MakeNodeReducesAndHashConses) {
  BddManager m(3);
  const NodeId x = m.variable(VarId{3});
  EXPECT_EQ(m.make_node(0, x, x), x);
  const NodeId a = m.make_node(0, kFalse, x);
  EXPECT_EQ(m.make_node(0, kFalse, x), a);
  const std::size_t before = m.store_size();
  m.variable(VarId{1});
  m.variable(VarId{1});
  EXPECT_EQ(m.store_size(), before + 1);
  EXPECT_THROW(m.make_node(2, a, kTrue), std::invalid_argument);  // child above
  EXPECT_TRUE(m.check_invariants());
}

TEST(Manager, ApplyIdentities) {
  BddManager m(4);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const NodeId f = random_function(m, rng, 3);
    EXPECT_EQ(m.bdd_and(f, kTrue), f);
    EXPECT_EQ(m.bdd_or(f, kFalse), f);
    EXPECT_EQ(m.bdd_or(f, m.negate(f)), kTrue);
    EXPECT_EQ(m.bdd_and(f, m.negate(f)), kFalse);
    EXPECT_EQ(m.negate(m.negate(f)), f);
  }
}

TEST(Manager, ForeignHandleRejected) {
  BddManager m(2);
  EXPECT_THROW(m.bdd_and(NodeId{999}, kTrue), std::invalid_argument);
}

TEST(Manager, ApplyMatchesTruthTables) {
  BddManager m(6);
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    const NodeId f = random_function(m, rng, 3), g = random_function(m, rng, 3);
    const auto tf = truth_table(m, f), tg = truth_table(m, g);
    const auto ta = truth_table(m, m.bdd_and(f, g)), to = truth_table(m, m.bdd_or(f, g));
    const auto tn = truth_table(m, m.negate(f));
    for (std::size_t k = 0; k < tf.size(); ++k) {
      ASSERT_EQ(ta[k], tf[k] && tg[k]);
      ASSERT_EQ(to[k], tf[k] || tg[k]);
      ASSERT_EQ(tn[k], !tf[k]);
    }
  }
  EXPECT_TRUE(m.check_invariants());
}

TEST(Build, SmallCases) {
  BddManager m(3);
  EXPECT_EQ(m.build_cnf(Cnf{3, {}}), kTrue);
  const NodeId x = m.build_cnf(Cnf{3, {{Literal(VarId{1}, true)}}});
  EXPECT_EQ(m.size(x), 3u);
  EXPECT_EQ(m.size(kTrue), 1u);
  EXPECT_EQ(m.size(kFalse), 1u);
  EXPECT_THROW(m.build_cnf(Cnf{4, {{Literal(VarId{4}, true)}}}), std::invalid_argument);
  EXPECT_THROW(m.build_cnf(Cnf{1, {{Literal(VarId{1}, true)}}}), std::invalid_argument);
}

TEST(Build, ChainSizes) {
  const Cnf c6 = harness::synth_chain(6);
  EXPECT_EQ(testsupport::rebuilt_size(c6, harness::chain_natural_order(6)), 8u);
  EXPECT_EQ(testsupport::rebuilt_size(c6, harness::chain_interleaved_order(6)), 16u);
  for (std::uint32_t n : {6u, 8u, 12u}) {
    EXPECT_EQ(reorder::size_under(harness::chain_source(n), harness::chain_natural_order(n)), n + 2);
    EXPECT_EQ(reorder::size_under(harness::chain_source(n), harness::chain_interleaved_order(n)),
              std::size_t{1} << (n / 2 + 1));
  }
}

TEST(Build, CanonicalUnderClausePermutation) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Cnf c = testsupport::random_cnf(6, 10, s);
    BddManager m(6, testsupport::random_order(6, s));
    const NodeId a = m.build_cnf(c);
    Rng rng(s + 100);
    rng.shuffle(std::span<Clause>(c.clauses));
    EXPECT_EQ(m.build_cnf(c), a);
  }
}

TEST(Eval, Examples) {
  BddManager m(6);
  const NodeId f = harness::build_chain(m, 6);
  EXPECT_FALSE(m.eval(f, std::vector<bool>(6, false)));
  EXPECT_TRUE(m.eval(kTrue, std::vector<bool>(6, false)));
  EXPECT_THROW(m.eval(f, std::vector<bool>(5, false)), std::invalid_argument);
}

TEST(Eval, AgreesWithCnfUpToTenVariables) {
  for (std::uint32_t n = 1; n <= 10; ++n) {
    const Cnf c = testsupport::random_cnf(n, 2 * n, n);
    BddManager m(n, testsupport::random_order(n, n));
    EXPECT_EQ(truth_table(m, m.build_cnf(c)), truth_table(c)) << "n=" << n;
  }
}

TEST(Swap, InvolutionAndRange) {
  BddManager m(6);
  const NodeId f = harness::build_chain(m, 6);
  const auto t = truth_table(m, f);
  m.swap_adjacent(2);
  m.swap_adjacent(2);
  EXPECT_EQ(m.order(), identity_order(6));
  EXPECT_EQ(m.size(f), 8u);
  EXPECT_EQ(truth_table(m, f), t);
  EXPECT_THROW(m.swap_adjacent(5), std::out_of_range);
}

TEST(Swap, ChainToInterleaved) {
  BddManager m(6);
  const NodeId f = harness::build_chain(m, 6);
  // 1 2 3 4 5 6 -> 1 3 5 2 4 6
  m.swap_adjacent(1);  // 1 3 2 4 5 6
  m.swap_adjacent(3);  // 1 3 2 5 4 6
  m.swap_adjacent(2);  // 1 3 5 2 4 6
  EXPECT_EQ(m.order(), harness::chain_interleaved_order(6));
  EXPECT_EQ(m.size(f), 16u);
  EXPECT_TRUE(m.check_invariants());
}

TEST(Swap, MatchesRebuildOracle) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Cnf c = testsupport::random_cnf(7, 9, s);
    BddManager m(7, testsupport::random_order(7, s));
    const NodeId f = m.build_cnf(c);
    const auto t = truth_table(m, f);
    Rng rng(s);
    m.swap_adjacent(static_cast<std::uint32_t>(rng.index(6)));
    ASSERT_EQ(m.size(f), testsupport::rebuilt_size(c, m.order())) << "seed " << s;
    ASSERT_EQ(truth_table(m, f), t);
    ASSERT_TRUE(m.check_invariants());
  }
}

TEST(ReorderTo, MatchesRebuildOracle) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::uint32_t n = 3 + static_cast<std::uint32_t>(s % 6);
    const Cnf c = testsupport::random_cnf(n, 2 * n, s);
    BddManager m(n, testsupport::random_order(n, s));
    NodeId f = m.build_cnf(c);
    const auto t = truth_table(m, f);
    const Order target = testsupport::random_order(n, s + 1000);
    m.reorder_to(target);
    ASSERT_EQ(m.order(), target);
    ASSERT_EQ(m.size(f), testsupport::rebuilt_size(c, target));
    ASSERT_EQ(truth_table(m, f), t);
    m.collect_garbage(std::span<NodeId>(&f, 1));
    // Both terminals survive collection even when f is constant.
    ASSERT_EQ(m.store_size(), m.is_terminal(f) ? 2u : m.size(f));
    ASSERT_EQ(truth_table(m, f), t);
    ASSERT_TRUE(m.check_invariants());
  }
}

TEST(ReorderTo, CurrentOrderIsNoop) {
  BddManager m(6);
  harness::build_chain(m, 6);
  m.reorder_to(identity_order(6));
  EXPECT_EQ(m.swap_count(), 0u);
}

TEST(Reduce, ImportsUnreducedDiagram) {
  // x1 ? (x2 ? 1 : 0) : (x2 ? 1 : 0) with a duplicated subtree: reduces to x2.
  UnreducedBdd u;
  u.nodes.push_back({1, 0, 1});  // 2: x2
  u.nodes.push_back({1, 0, 1});  // 3: x2 again
  u.nodes.push_back({0, 2, 3});  // 4: x1
  u.root = 4;
  BddManager m(2);
  EXPECT_EQ(reduce(m, u), m.variable(VarId{2}));

  UnreducedBdd bad;
  bad.nodes.push_back({0, 0, 9});
  bad.root = 2;
  EXPECT_THROW(reduce(m, bad), std::invalid_argument);
}

TEST(Dot, UsesDrawingConvention) {
  BddManager m(2);
  const std::string dot = m.to_dot(m.bdd_and(m.variable(VarId{1}), m.variable(VarId{2})));
  EXPECT_NE(dot.find("style=dotted"), std::string::npos);
  EXPECT_NE(dot.find("style=solid"), std::string::npos);
  EXPECT_NE(dot.find("label=\"x1\""), std::string::npos);
}

TEST(OrderFile, RoundTrip) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Order o = testsupport::random_order(1 + static_cast<std::uint32_t>(s), s);
    EXPECT_EQ(parse_order(format_order(o)), o);
  }
  EXPECT_EQ(parse_order("# top first\n3\n\n1\n2\n"), ord({3, 1, 2}));
  EXPECT_THROW(parse_order("1\nx\n"), std::exception);
}
