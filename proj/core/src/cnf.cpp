#include "hyperorder/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "hyperorder/error.hpp"
#include "hyperorder/random.hpp"

namespace hyperorder {

Literal Literal::from_dimacs(int value) {
  if (value == 0) throw std::invalid_argument("literal 0 is the clause terminator");
  const auto magnitude = static_cast<std::uint32_t>(value < 0 ? -static_cast<long long>(value) : value);
  return {VarId{magnitude}, value > 0};
}

int Literal::dimacs() const {
  const int v = static_cast<int>(var_.index);
  return positive_ ? v : -v;
}

std::size_t Cnf::literal_count() const {
  std::size_t total = 0;
  for (const auto& c : clauses) total += c.size();
  return total;
}

namespace {

std::string clause_label(std::size_t number) { return "clause " + std::to_string(number); }

std::size_t distinct_vars(const Clause& clause) {
  std::vector<std::uint32_t> vars;
  for (const auto& lit : clause) vars.push_back(lit.var().index);
  std::sort(vars.begin(), vars.end());
  return static_cast<std::size_t>(std::unique(vars.begin(), vars.end()) - vars.begin());
}

bool parse_int(std::string_view token, long long& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

Cnf parse(std::string_view text, bool strict) {
  Cnf cnf;
  bool have_header = false;
  long long declared_clauses = 0;
  Clause current;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool finished = false;  // a '%' line ends the clause section (SATLIB style)

  auto finish_clause = [&] {
    const std::size_t number = cnf.clauses.size() + 1;
    if (current.empty()) throw ParseError(clause_label(number) + " is empty", number);
    const std::size_t distinct = distinct_vars(current);
    if (distinct > 3) {
      throw ParseError(clause_label(number) + " has " + std::to_string(distinct) +
                           " distinct variables; input must be 3-CNF",
                       number);
    }
    if (strict && distinct != current.size()) {
      throw ParseError(clause_label(number) +
                           " repeats a variable (duplicate literal or tautology)",
                       number);
    }
    cnf.clauses.push_back(std::move(current));
    current.clear();
  };

  while (!finished && std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "%") {
      finished = true;
      break;
    }
    if (tok == "p") {
      if (have_header) throw ParseError("duplicate header on line " + std::to_string(line_no));
      std::string fmt, nv, nc, extra;
      if (!(tokens >> fmt >> nv >> nc) || fmt != "cnf" || (tokens >> extra)) {
        throw ParseError("malformed header on line " + std::to_string(line_no));
      }
      long long vars = 0;
      if (!parse_int(nv, vars) || !parse_int(nc, declared_clauses) || vars < 1 ||
          declared_clauses < 0 || vars > INT32_MAX) {
        throw ParseError("malformed header on line " + std::to_string(line_no));
      }
      cnf.num_vars = static_cast<std::uint32_t>(vars);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("clause data before 'p cnf' header");
    do {
      long long value = 0;
      if (!parse_int(tok, value)) {
        throw ParseError("bad token '" + tok + "' on line " + std::to_string(line_no),
                         cnf.clauses.size() + 1);
      }
      if (value == 0) {
        finish_clause();
        continue;
      }
      const long long magnitude = value < 0 ? -value : value;
      if (magnitude > cnf.num_vars) {
        const std::size_t number = cnf.clauses.size() + 1;
        throw ParseError("literal " + tok + " in " + clause_label(number) +
                             " exceeds num_vars " + std::to_string(cnf.num_vars),
                         number);
      }
      current.push_back(Literal::from_dimacs(static_cast<int>(value)));
    } while (tokens >> tok);
  }

  if (!have_header) throw ParseError("missing 'p cnf' header");
  if (!current.empty()) {
    throw ParseError(clause_label(cnf.clauses.size() + 1) + " is not terminated by 0",
                     cnf.clauses.size() + 1);
  }
  if (static_cast<long long>(cnf.clauses.size()) != declared_clauses) {
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(cnf.clauses.size()));
  }
  return cnf;
}

Clause sorted_copy(const Clause& clause) {
  Clause c = clause;
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace

Cnf parse_dimacs(std::string_view text) { return parse(text, true); }

Cnf parse_dimacs_raw(std::string_view text) { return parse(text, false); }

Cnf normalize(const Cnf& cnf) {
  Cnf out;
  out.num_vars = cnf.num_vars;
  std::set<Clause> seen;
  for (const auto& clause : cnf.clauses) {
    Clause cleaned;
    bool tautology = false;
    for (const auto& lit : clause) {
      if (std::find(cleaned.begin(), cleaned.end(), lit) != cleaned.end()) continue;
      if (std::find(cleaned.begin(), cleaned.end(), lit.negated()) != cleaned.end()) {
        tautology = true;
        break;
      }
      cleaned.push_back(lit);
    }
    if (tautology) continue;
    if (!seen.insert(sorted_copy(cleaned)).second) continue;
    out.clauses.push_back(std::move(cleaned));
  }
  return out;
}

bool is_normalized(const Cnf& cnf) { return normalize(cnf) == cnf; }

Cnf flip_occurrences(const Cnf& cnf, const std::vector<std::size_t>& positions) {
  Cnf out = cnf;
  std::vector<Literal*> flat;
  for (auto& clause : out.clauses)
    for (auto& lit : clause) flat.push_back(&lit);
  for (std::size_t pos : positions) {
    if (pos >= flat.size()) throw std::out_of_range("literal occurrence out of range");
    *flat[pos] = flat[pos]->negated();
  }
  return out;
}

Cnf mutate(const Cnf& cnf, int k, std::uint64_t seed) {
  if (k < 1 || k > 3) throw std::invalid_argument("mutate: k must be in 1..3");
  const std::size_t occurrences = cnf.literal_count();
  if (occurrences == 0) throw std::invalid_argument("mutate: formula has no literal occurrences");
  const std::size_t flips = std::min<std::size_t>(static_cast<std::size_t>(k), occurrences);

  Rng rng(seed);
  std::vector<std::size_t> positions;
  while (positions.size() < flips) {
    const std::size_t pick = rng.index(occurrences);
    if (std::find(positions.begin(), positions.end(), pick) == positions.end()) {
      positions.push_back(pick);
    }
  }
  return normalize(flip_occurrences(cnf, positions));
}

std::string emit_dimacs(const Cnf& cnf) {
  std::string out = "p cnf " + std::to_string(cnf.num_vars) + " " +
                    std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& clause : cnf.clauses) {
    for (const auto& lit : clause) {
      out += std::to_string(lit.dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

bool evaluate(const Cnf& cnf, const std::vector<bool>& assignment) {
  if (assignment.size() != cnf.num_vars) throw std::invalid_argument("assignment length mismatch");
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (const auto& lit : clause) {
      if (assignment[lit.var().index - 1] == lit.positive()) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

std::vector<Clause> canonical_clause_set(const Cnf& cnf) {
  std::vector<Clause> set;
  set.reserve(cnf.clauses.size());
  for (const auto& clause : cnf.clauses) set.push_back(sorted_copy(clause));
  std::sort(set.begin(), set.end());
  return set;
}

Cnf load_dimacs_file(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream file(path);
    if (!file) throw Error("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(file), {});
  }
  return normalize(parse_dimacs_raw(text));
}

}  // namespace hyperorder
