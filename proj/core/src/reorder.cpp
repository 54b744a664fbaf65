#include "hyperorder/reorder.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hyperorder/random.hpp"

namespace hyperorder::reorder {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Applies the adoption rule to a manager-based run: a non-improving result is
/// rolled back so the manager ends in the initial order.
Result finish(BddManager& mgr, NodeId root, const Order& initial, std::size_t initial_size,
              Clock::time_point start) {
  Result r;
  r.initial_size = initial_size;
  const std::size_t now = mgr.size(root);
  const Ratio ratio = compression_ratio(initial_size, now);
  if (!ratio.adopted) mgr.reorder_to(initial);
  r.order = mgr.order();
  r.final_size = ratio.adopted ? now : initial_size;
  r.eta = ratio.eta;
  r.adopted = ratio.adopted;
  r.seconds = seconds_since(start);
  return r;
}

// Adjacent-swap offsets that walk through every permutation of a window,
// starting from the identity arrangement.
const std::vector<std::uint32_t>& window_walk(int k) {
  static const std::vector<std::uint32_t> two{0};
  static const std::vector<std::uint32_t> three{0, 1, 0, 1, 0};
  return k == 2 ? two : three;
}

// Swaps leave unreachable nodes behind, and every later swap pays for them.
void collect_if_bloated(BddManager& mgr, NodeId& root, std::size_t live) {
  if (mgr.store_size() > 4 * live + 256) mgr.collect_garbage(std::span<NodeId>(&root, 1));
}

void transpose_levels(BddManager& mgr, std::uint32_t i, std::uint32_t j,
                      std::vector<std::uint32_t>& swaps) {
  swaps.clear();
  for (std::uint32_t l = i; l < j; ++l) swaps.push_back(l);
  for (std::uint32_t l = j - 1; l > i; --l) swaps.push_back(l - 1);
  for (std::uint32_t l : swaps) mgr.swap_adjacent(l);
}

}  // namespace

Ratio compression_ratio(std::size_t initial, std::size_t final) {
  if (initial < 1) throw std::invalid_argument("compression_ratio: initial size must be >= 1");
  if (final >= initial) return {0.0, false};
  return {(static_cast<double>(final) - static_cast<double>(initial)) / static_cast<double>(initial),
          true};
}

Result window(BddManager& mgr, NodeId& root, int k, int max_passes) {
  if (k != 2 && k != 3) throw std::invalid_argument("window size must be 2 or 3");
  const auto start = Clock::now();
  const Order initial = mgr.order();
  const std::size_t initial_size = mgr.size(root);
  const std::uint32_t n = mgr.num_vars();
  const auto& walk = window_walk(k);

  std::size_t current = initial_size;
  for (int pass = 0; pass < max_passes && n >= static_cast<std::uint32_t>(k); ++pass) {
    const std::size_t pass_start = current;
    for (std::uint32_t pos = 0; pos + k <= n; ++pos) {
      Order best_order = mgr.order();
      std::size_t best = current;
      for (std::uint32_t offset : walk) {
        mgr.swap_adjacent(pos + offset);
        const std::size_t s = mgr.size(root);
        if (s < best) {
          best = s;
          best_order = mgr.order();
        }
      }
      mgr.reorder_to(best_order);
      current = best;
      collect_if_bloated(mgr, root, current);
    }
    if (current >= pass_start) break;
  }
  return finish(mgr, root, initial, initial_size, start);
}

Result sift(BddManager& mgr, NodeId& root, double max_growth) {
  if (!(max_growth > 1.0)) throw std::invalid_argument("sift: max_growth must exceed 1");
  const auto start = Clock::now();
  const Order initial = mgr.order();
  const std::size_t initial_size = mgr.size(root);
  const std::uint32_t n = mgr.num_vars();
  if (n < 2) return finish(mgr, root, initial, initial_size, start);

  const auto profile = mgr.level_profile(root);
  std::vector<std::uint32_t> levels(n);
  std::iota(levels.begin(), levels.end(), 0u);
  std::stable_sort(levels.begin(), levels.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return profile[a] > profile[b]; });
  std::vector<VarId> schedule;
  for (std::uint32_t l : levels) schedule.push_back(mgr.var_at(l));

  std::size_t best = initial_size;
  for (VarId v : schedule) {
    std::uint32_t pos = mgr.level_of(v);
    std::uint32_t best_pos = pos;
    const double limit_factor = max_growth;

    auto probe = [&] {
      const std::size_t s = mgr.size(root);
      if (s < best) {
        best = s;
        best_pos = pos;
      }
      collect_if_bloated(mgr, root, s);
      return static_cast<double>(s) <= limit_factor * static_cast<double>(best);
    };
    auto go_down = [&] {
      while (pos + 1 < n) {
        mgr.swap_adjacent(pos);
        ++pos;
        if (!probe()) break;
      }
    };
    auto go_up = [&] {
      while (pos > 0) {
        mgr.swap_adjacent(pos - 1);
        --pos;
        if (!probe()) break;
      }
    };

    if (n - 1 - pos <= pos) {
      go_down();
      go_up();
    } else {
      go_up();
      go_down();
    }
    while (pos < best_pos) {
      mgr.swap_adjacent(pos);
      ++pos;
    }
    while (pos > best_pos) {
      mgr.swap_adjacent(pos - 1);
      --pos;
    }
  }
  return finish(mgr, root, initial, initial_size, start);
}

Result random_swaps(BddManager& mgr, NodeId& root, int trials, std::uint64_t seed) {
  if (trials < 0) throw std::invalid_argument("random_swaps: trials must be >= 0");
  const auto start = Clock::now();
  const Order initial = mgr.order();
  const std::size_t initial_size = mgr.size(root);
  const std::uint32_t n = mgr.num_vars();

  Rng rng(seed);
  std::size_t current = initial_size;
  std::vector<std::uint32_t> swaps;
  for (int t = 0; t < trials && n >= 2; ++t) {
    auto i = static_cast<std::uint32_t>(rng.index(n));
    auto j = static_cast<std::uint32_t>(rng.index(n - 1));
    if (j >= i) ++j;
    if (i > j) std::swap(i, j);
    transpose_levels(mgr, i, j, swaps);
    const std::size_t s = mgr.size(root);
    if (s < current) {
      current = s;
    } else {
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) mgr.swap_adjacent(*it);
    }
    collect_if_bloated(mgr, root, current);
  }
  return finish(mgr, root, initial, initial_size, start);
}

FunctionSource FunctionSource::from_cnf(Cnf cnf) {
  const std::uint32_t n = cnf.num_vars;
  return {n, [cnf = std::move(cnf)](BddManager& mgr) { return mgr.build_cnf(cnf); }};
}

std::size_t size_under(const FunctionSource& source, std::span<const VarId> order) {
  BddManager mgr(source.num_vars, Order(order.begin(), order.end()));
  return mgr.size(source.build(mgr));
}

namespace {

Order random_permutation(std::uint32_t n, Rng& rng) {
  Order p = identity_order(n);
  rng.shuffle(std::span<VarId>(p));
  return p;
}

constexpr int kCloneRetries = 8;

/// OX1: copy p1's slice [a, b], fill the rest in p2's order starting after b.
Order order_crossover(const Order& p1, const Order& p2, Rng& rng) {
  const std::size_t n = p1.size();
  std::size_t a = rng.index(n), b = rng.index(n);
  if (a > b) std::swap(a, b);
  Order child(n);
  std::vector<bool> used(n + 1, false);
  for (std::size_t i = a; i <= b; ++i) {
    child[i] = p1[i];
    used[p1[i].index] = true;
  }
  std::size_t write = (b + 1) % n;
  for (std::size_t step = 0; step < n; ++step) {
    const VarId gene = p2[(b + 1 + step) % n];
    if (used[gene.index]) continue;
    child[write] = gene;
    used[gene.index] = true;
    write = (write + 1) % n;
  }
  return child;
}

}  // namespace

Result genetic(const FunctionSource& source, std::span<const Order> seed_orders,
               const GaConfig& cfg, std::uint64_t seed) {
  if (seed_orders.empty()) throw std::invalid_argument("genetic: need at least one seed order");
  if (cfg.population < 1 || cfg.tournament < 1 || cfg.elitism < 0 || cfg.max_generations < 0 ||
      cfg.stagnation_limit < 1) {
    throw std::invalid_argument("genetic: configuration fields must be positive");
  }
  const auto start = Clock::now();
  const std::uint32_t n = source.num_vars;
  for (const auto& o : seed_orders) validate_order(n, o);

  Rng rng(seed);
  BddManager scratch(n);
  std::map<Order, std::size_t> fitness_cache;
  auto fitness = [&](const Order& o) {
    if (auto it = fitness_cache.find(o); it != fitness_cache.end()) return it->second;
    scratch.reset(o);
    const std::size_t s = scratch.size(source.build(scratch));
    fitness_cache.emplace(o, s);
    return s;
  };
  auto better = [](std::size_t fa, const Order& a, std::size_t fb, const Order& b) {
    return fa != fb ? fa < fb : a < b;
  };

  const std::size_t pop_size = static_cast<std::size_t>(cfg.population);
  std::vector<Order> population;
  for (const auto& o : seed_orders) {
    if (population.size() < pop_size &&
        std::find(population.begin(), population.end(), o) == population.end()) {
      population.push_back(o);
    }
  }
  while (population.size() < pop_size) population.push_back(random_permutation(n, rng));

  const std::size_t initial_size = fitness(seed_orders.front());
  Order best_order = seed_orders.front();
  std::size_t best = initial_size;

  int stagnant = 0;
  for (int gen = 0;; ++gen) {
    std::vector<std::size_t> fit(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) fit[i] = fitness(population[i]);
    std::vector<std::size_t> rank(population.size());
    std::iota(rank.begin(), rank.end(), 0u);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      return better(fit[a], population[a], fit[b], population[b]);
    });

    const std::size_t leader = rank.front();
    if (better(fit[leader], population[leader], best, best_order)) {
      const bool smaller = fit[leader] < best;
      best = fit[leader];
      best_order = population[leader];
      stagnant = smaller ? 0 : stagnant + 1;
    } else {
      ++stagnant;
    }
    if (gen >= cfg.max_generations || (gen > 0 && stagnant >= cfg.stagnation_limit)) break;

    auto tournament = [&]() -> const Order& {
      std::size_t pick = rng.index(population.size());
      for (int t = 1; t < cfg.tournament; ++t) {
        const std::size_t other = rng.index(population.size());
        if (better(fit[other], population[other], fit[pick], population[pick])) pick = other;
      }
      return population[pick];
    };

    std::vector<Order> next;
    std::set<Order> members;
    for (std::size_t e = 0; e < rank.size() && next.size() < static_cast<std::size_t>(cfg.elitism);
         ++e) {
      next.push_back(population[rank[e]]);
      members.insert(next.back());
    }
    while (next.size() < pop_size) {
      const Order& p1 = tournament();
      const Order& p2 = tournament();
      Order child = (n > 1 && rng.chance(cfg.crossover_rate)) ? order_crossover(p1, p2, rng) : p1;
      if (n > 1 && rng.chance(cfg.mutation_rate)) {
        const auto flips = rng.between(1, 3);
        for (long long f = 0; f < flips; ++f) {
          const std::size_t i = rng.index(n);
          std::size_t j = rng.index(n - 1);
          if (j >= i) ++j;
          std::swap(child[i], child[j]);
        }
      }
      // Clones add nothing to the search; perturb them while tries remain.
      for (int tries = 0; n > 1 && tries < kCloneRetries && members.count(child) != 0; ++tries) {
        const std::size_t i = rng.index(n);
        std::size_t j = rng.index(n - 1);
        if (j >= i) ++j;
        std::swap(child[i], child[j]);
      }
      members.insert(child);
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }

  Result r;
  r.initial_size = initial_size;
  const Ratio ratio = compression_ratio(initial_size, best);
  r.adopted = ratio.adopted;
  r.eta = ratio.eta;
  r.order = ratio.adopted ? best_order : seed_orders.front();
  r.final_size = ratio.adopted ? best : initial_size;
  r.seconds = seconds_since(start);
  return r;
}

Optimum optimal_order(const FunctionSource& source, std::uint32_t cap) {
  const std::uint32_t n = source.num_vars;
  if (n > cap) {
    throw std::invalid_argument("exhaustive search over " + std::to_string(n) +
                                " variables exceeds cap " + std::to_string(cap));
  }
  Order order = identity_order(n);
  Optimum best{order, SIZE_MAX};
  BddManager mgr(n);
  do {
    mgr.reset(order);
    const std::size_t s = mgr.size(source.build(mgr));
    if (s < best.size) best = {order, s};
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

Result exhaustive(const FunctionSource& source, std::span<const VarId> initial, std::uint32_t cap) {
  const auto start = Clock::now();
  validate_order(source.num_vars, initial);
  const Optimum opt = optimal_order(source, cap);
  Result r;
  r.initial_size = size_under(source, initial);
  const Ratio ratio = compression_ratio(r.initial_size, opt.size);
  r.adopted = ratio.adopted;
  r.eta = ratio.eta;
  r.order = ratio.adopted ? opt.order : Order(initial.begin(), initial.end());
  r.final_size = ratio.adopted ? opt.size : r.initial_size;
  r.seconds = seconds_since(start);
  return r;
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "win2") return Algorithm::Win2;
  if (name == "win3") return Algorithm::Win3;
  if (name == "sift") return Algorithm::Sift;
  if (name == "rand") return Algorithm::Rand;
  if (name == "ga") return Algorithm::Ga;
  if (name == "exhaustive") return Algorithm::Exhaustive;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::Win2: return "win2";
    case Algorithm::Win3: return "win3";
    case Algorithm::Sift: return "sift";
    case Algorithm::Rand: return "rand";
    case Algorithm::Ga: return "ga";
    case Algorithm::Exhaustive: return "exhaustive";
  }
  return "?";
}

Result run(Algorithm alg, const FunctionSource& source, std::span<const VarId> initial,
           const RunOptions& opts) {
  const Order start(initial.begin(), initial.end());
  switch (alg) {
    case Algorithm::Ga: {
      std::vector<Order> seeds{start};
      seeds.insert(seeds.end(), opts.ga_extra_seeds.begin(), opts.ga_extra_seeds.end());
      return genetic(source, seeds, opts.ga, opts.seed);
    }
    case Algorithm::Exhaustive:
      return exhaustive(source, start, opts.exhaustive_cap);
    default:
      break;
  }
  BddManager mgr(source.num_vars, start);
  NodeId root = source.build(mgr);
  mgr.collect_garbage(std::span<NodeId>(&root, 1));
  switch (alg) {
    case Algorithm::Win2: return window(mgr, root, 2, opts.window_passes);
    case Algorithm::Win3: return window(mgr, root, 3, opts.window_passes);
    case Algorithm::Sift: return sift(mgr, root, opts.max_growth);
    case Algorithm::Rand:
      return random_swaps(mgr, root, opts.rand_trials_per_var * static_cast<int>(source.num_vars),
                          opts.seed);
    default: break;
  }
  throw std::logic_error("unreachable");
}

}  // namespace hyperorder::reorder
