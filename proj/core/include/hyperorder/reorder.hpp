#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperorder/bdd.hpp"
#include "hyperorder/cnf.hpp"

namespace hyperorder::reorder {

struct Result {
  Order order;
  std::size_t initial_size = 0;
  std::size_t final_size = 0;
  double eta = 0.0;
  bool adopted = false;
  double seconds = 0.0;
};

struct Ratio {
  double eta = 0.0;
  bool adopted = false;
};

/// eta = (final - initial) / initial when the new order is strictly smaller,
/// otherwise (0, not adopted).
Ratio compression_ratio(std::size_t initial, std::size_t final);

// The manager-based algorithms collect garbage while they run; `root` is
// rewritten to its new handle and every other handle into `mgr` is invalidated.

/// Sliding window of k adjacent levels (k = 2 or 3); every window permutation
/// is tried and the smallest kept. Passes repeat until one yields no gain.
Result window(BddManager& mgr, NodeId& root, int k, int max_passes = 10);

/// Rudell sifting, one pass, variables taken in decreasing order of their
/// level's node count.
Result sift(BddManager& mgr, NodeId& root, double max_growth = 2.0);

/// Random transpositions of two levels, each kept only if it shrinks the BDD.
Result random_swaps(BddManager& mgr, NodeId& root, int trials, std::uint64_t seed);

/// A function that can be rebuilt from scratch in a fresh manager; GA and the
/// exhaustive oracle evaluate orders this way.
struct FunctionSource {
  std::uint32_t num_vars = 0;
  std::function<NodeId(BddManager&)> build;

  static FunctionSource from_cnf(Cnf cnf);
};

std::size_t size_under(const FunctionSource& source, std::span<const VarId> order);

struct GaConfig {
  int population = 16;
  int tournament = 2;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  int elitism = 2;
  int max_generations = 50;
  int stagnation_limit = 10;
};

/// Genetic search over permutations with order crossover. `seed_orders` (at
/// least one) enter generation 0; the first one is the reference order for the
/// initial size.
Result genetic(const FunctionSource& source, std::span<const Order> seed_orders,
               const GaConfig& cfg, std::uint64_t seed);

struct Optimum {
  Order order;
  std::size_t size = 0;
};

/// Global minimum over all n! orders; ties go to the lexicographically
/// smallest order. Throws when num_vars > cap.
Optimum optimal_order(const FunctionSource& source, std::uint32_t cap = 8);

/// `optimal_order` wrapped in the adoption rule against `initial`.
Result exhaustive(const FunctionSource& source, std::span<const VarId> initial,
                  std::uint32_t cap = 8);

enum class Algorithm { Win2, Win3, Sift, Rand, Ga, Exhaustive };

Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm alg);

struct RunOptions {
  std::uint64_t seed = 0;
  int window_passes = 10;
  double max_growth = 2.0;
  int rand_trials_per_var = 10;
  GaConfig ga;
  /// Extra generation-0 members for GA, after the initial order.
  std::vector<Order> ga_extra_seeds;
  std::uint32_t exhaustive_cap = 8;
};

/// Runs one algorithm on `source` starting from `initial`. Manager-based
/// algorithms run on a fresh manager; construction time is excluded from
/// `Result::seconds`.
Result run(Algorithm alg, const FunctionSource& source, std::span<const VarId> initial,
           const RunOptions& opts = {});

}  // namespace hyperorder::reorder
