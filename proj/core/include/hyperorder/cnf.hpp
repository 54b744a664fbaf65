#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hyperorder {

/// 1-based variable index (DIMACS convention).
struct VarId {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const VarId&) const = default;
};

class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(VarId var, bool positive) : var_(var), positive_(positive) {}

  /// From a nonzero signed DIMACS integer.
  static Literal from_dimacs(int value);

  constexpr VarId var() const { return var_; }
  constexpr bool positive() const { return positive_; }
  constexpr Literal negated() const { return {var_, !positive_}; }
  int dimacs() const;

  constexpr auto operator<=>(const Literal&) const = default;

 private:
  VarId var_{};
  bool positive_ = true;
};

using Clause = std::vector<Literal>;

/// A CNF over variables 1..num_vars. Clause order and literal order within a
/// clause are significant: they fix the hyperedge tuples of the encoding.
struct Cnf {
  std::uint32_t num_vars = 0;
  std::vector<Clause> clauses;

  bool operator==(const Cnf&) const = default;

  std::size_t literal_count() const;
};

/// Strict DIMACS reader. Rejects clauses that repeat a variable (duplicate
/// literal or tautology), in addition to every structural error.
Cnf parse_dimacs(std::string_view text);

/// Lenient DIMACS reader for real-world files: repeated variables are kept so
/// that `normalize` can clean them. Still rejects empty clauses, out-of-range
/// literals and clauses with more than three distinct variables.
Cnf parse_dimacs_raw(std::string_view text);

/// Removes duplicate literals (first occurrence wins), drops tautological
/// clauses and drops clauses whose literal set equals an earlier clause's.
Cnf normalize(const Cnf& cnf);

bool is_normalized(const Cnf& cnf);

/// Flips the sign of `k` distinct literal occurrences chosen uniformly with a
/// generator seeded by `seed`, then re-normalizes. k is clamped to the number
/// of occurrences.
Cnf mutate(const Cnf& cnf, int k, std::uint64_t seed);

/// Deterministic core of `mutate`: flips the occurrences at the given flat
/// positions (clause-major, literal-minor) without re-normalizing.
Cnf flip_occurrences(const Cnf& cnf, const std::vector<std::size_t>& positions);

std::string emit_dimacs(const Cnf& cnf);

/// Evaluates the formula; assignment[i] is the value of variable i+1.
bool evaluate(const Cnf& cnf, const std::vector<bool>& assignment);

/// Order-insensitive identity of a normalized formula: each clause's literals
/// sorted, then the clause list sorted. Used for mutant distinctness.
std::vector<Clause> canonical_clause_set(const Cnf& cnf);

/// Reads a DIMACS file, or standard input when `path` is "-", then normalizes.
Cnf load_dimacs_file(const std::string& path);

}  // namespace hyperorder
