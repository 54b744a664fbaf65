#include <gtest/gtest.h>

#include "hyperorder/cnf.hpp"
#include "hyperorder/error.hpp"
#include "hyperorder/random.hpp"
#include "oracles.hpp"

using namespace hyperorder;

namespace {

Literal L(int v) { return Literal::from_dimacs(v); }

Cnf make(std::uint32_t n, std::vector<std::vector<int>> clauses) {
  Cnf c;
  c.num_vars = n;
  for (const auto& cl : clauses) {
    Clause out;
    for (int v : cl) out.push_back(L(v));
    c.clauses.push_back(out);
  }
  return c;
}

std::size_t parse_error_clause(const std::string& text) {
  try {
    parse_dimacs(text);
  } catch (const ParseError& e) {
    return e.clause();
  }
  ADD_FAILURE() << "no ParseError for: " << text;
  return SIZE_MAX;
}

}  // namespace

TEST(Dimacs, ParsesWorkedExample) {
  EXPECT_EQ(parse_dimacs("p cnf 3 2\n1 2 0\n-1 2 3 0\n"), make(3, {{1, 2}, {-1, 2, 3}}));
}

TEST(Dimacs, ParsesMinimalFormula) {
  EXPECT_EQ(parse_dimacs("p cnf 1 1\n1 0\n"), make(1, {{1}}));
}

TEST(Dimacs, CommentsAndMultilineClauses) {
  EXPECT_EQ(parse_dimacs("c hello\np cnf 3 2\n1\n2 0 -1 2\n3 0\n"), make(3, {{1, 2}, {-1, 2, 3}}));
}

TEST(Dimacs, RejectsRepeatedVariable) {
  EXPECT_EQ(parse_error_clause("p cnf 2 1\n1 -1 2 0\n"), 1u);
  EXPECT_EQ(parse_error_clause("p cnf 2 2\n1 0\n2 2 0\n"), 2u);
}

TEST(Dimacs, RejectsStructuralErrors) {
  EXPECT_EQ(parse_error_clause("p cnf 3 2\n1 2 0\n0\n"), 2u);            // empty clause
  EXPECT_EQ(parse_error_clause("p cnf 4 1\n1 2 3 4 0\n"), 1u);           // 4 variables
  EXPECT_EQ(parse_error_clause("p cnf 2 1\n1 3 0\n"), 1u);               // out of range
  EXPECT_THROW(parse_dimacs("1 2 0\n"), ParseError);                     // no header
  EXPECT_THROW(parse_dimacs("p cnf 2 1\np cnf 2 1\n1 0\n"), ParseError); // duplicate header
  EXPECT_THROW(parse_dimacs("p cnf x 1\n1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 0\n"), ParseError);            // count mismatch
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), ParseError);            // unterminated
}

TEST(Dimacs, RawParserKeepsRepeatsForNormalize) {
  const Cnf raw = parse_dimacs_raw("p cnf 2 1\n1 1 2 0\n");
  EXPECT_EQ(raw, make(2, {{1, 1, 2}}));
  EXPECT_EQ(normalize(raw), make(2, {{1, 2}}));
  EXPECT_THROW(parse_dimacs_raw("p cnf 4 1\n1 2 3 4 0\n"), ParseError);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize(make(2, {{1, 1, 2}})), make(2, {{1, 2}}));
  EXPECT_EQ(normalize(make(2, {{1, -1, 2}})), make(2, {}));
  EXPECT_EQ(normalize(make(2, {{1, 2}, {1, 2}})), make(2, {{1, 2}}));
  EXPECT_EQ(normalize(make(2, {{1, 2}, {2, 1}, {-1}})), make(2, {{1, 2}, {-1}}));
}

TEST(Normalize, Idempotent) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Cnf c = make(4, {});
    Rng rng(s);
    for (int i = 0; i < 8; ++i) {
      Clause cl;
      for (long long k = rng.between(1, 3); k > 0; --k) {
        cl.emplace_back(VarId{static_cast<std::uint32_t>(rng.between(1, 4))}, rng.chance(0.5));
      }
      c.clauses.push_back(cl);
    }
    const Cnf once = normalize(c);
    EXPECT_TRUE(is_normalized(once));
    EXPECT_EQ(normalize(once), once);
  }
}

TEST(Mutate, SingleForcedFlip) {
  EXPECT_EQ(flip_occurrences(make(2, {{1, 2}}), {0}), make(2, {{-1, 2}}));
  const Cnf m = mutate(make(2, {{1, 2}}), 1, 7);
  EXPECT_TRUE(m == make(2, {{-1, 2}}) || m == make(2, {{1, -2}}));
}

TEST(Mutate, RejectsBadK) {
  const Cnf c = make(2, {{1, 2}});
  EXPECT_THROW(mutate(c, 0, 1), std::invalid_argument);
  EXPECT_THROW(mutate(c, 4, 1), std::invalid_argument);
  EXPECT_THROW(mutate(make(2, {}), 1, 1), std::invalid_argument);
}

TEST(Mutate, DeterministicAndKeepsVariables) {
  const Cnf c = testsupport::random_cnf(8, 12, 3);
  for (int k = 1; k <= 3; ++k) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Cnf a = mutate(c, k, s);
      EXPECT_EQ(a, mutate(c, k, s));
      EXPECT_EQ(a.num_vars, c.num_vars);
      EXPECT_TRUE(is_normalized(a));
    }
  }
}

TEST(Mutate, FlipsExactlyKOccurrences) {
  const Cnf c = make(6, {{1, 2, 3}, {4, 5, 6}, {-1, 4}});
  for (int k = 1; k <= 3; ++k) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Cnf m = mutate(c, k, s);
      ASSERT_EQ(m.clauses.size(), c.clauses.size());  // no collisions possible here
      int flipped = 0;
      for (std::size_t i = 0; i < c.clauses.size(); ++i) {
        for (std::size_t j = 0; j < c.clauses[i].size(); ++j) {
          EXPECT_EQ(m.clauses[i][j].var(), c.clauses[i][j].var());
          flipped += m.clauses[i][j].positive() != c.clauses[i][j].positive();
        }
      }
      EXPECT_EQ(flipped, k);
    }
  }
}

TEST(Emit, Examples) {
  EXPECT_EQ(emit_dimacs(make(3, {{1, 2}, {-1, 2, 3}})), "p cnf 3 2\n1 2 0\n-1 2 3 0\n");
  EXPECT_EQ(emit_dimacs(make(1, {{1}})), "p cnf 1 1\n1 0\n");
}

TEST(Emit, RoundTripOnRandomFormulas) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Cnf c = testsupport::random_cnf(1 + static_cast<std::uint32_t>(s % 9), 1 + s % 13, s);
    EXPECT_EQ(parse_dimacs(emit_dimacs(c)), c);
  }
}

TEST(Evaluate, MatchesDefinition) {
  const Cnf c = make(3, {{1, 2}, {-1, 2, 3}});
  EXPECT_FALSE(evaluate(c, {false, false, false}));
  EXPECT_TRUE(evaluate(c, {false, true, false}));
  EXPECT_FALSE(evaluate(c, {true, false, false}));
  EXPECT_TRUE(evaluate(c, {true, false, true}));
  EXPECT_TRUE(evaluate(make(2, {}), {false, false}));
}

TEST(CanonicalClauseSet, IgnoresOrder) {
  EXPECT_EQ(canonical_clause_set(make(3, {{1, 2}, {-3, 1}})),
            canonical_clause_set(make(3, {{1, -3}, {2, 1}})));
  EXPECT_NE(canonical_clause_set(make(3, {{1, 2}})), canonical_clause_set(make(3, {{1, -2}})));
}
