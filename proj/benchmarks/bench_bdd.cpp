#include <benchmark/benchmark.h>

#include "hyperorder/harness.hpp"
#include "hyperorder/reorder.hpp"

using namespace hyperorder;

namespace {

Cnf formula(std::int64_t n) {
  const auto v = static_cast<std::uint32_t>(n);
  return harness::random_3cnf(v, static_cast<std::uint32_t>(2.2 * v), 17);
}

void BM_BuildCnf(benchmark::State& state) {
  const Cnf cnf = formula(state.range(0));
  const Order order = frequency_order(cnf);
  for (auto _ : state) {
    BddManager m(cnf.num_vars, order);
    benchmark::DoNotOptimize(m.build_cnf(cnf));
  }
}
BENCHMARK(BM_BuildCnf)->Arg(10)->Arg(16)->Arg(24);

void BM_SwapAdjacent(benchmark::State& state) {
  const Cnf cnf = formula(state.range(0));
  BddManager m(cnf.num_vars, frequency_order(cnf));
  NodeId root = m.build_cnf(cnf);
  m.collect_garbage(std::span<NodeId>(&root, 1));
  const std::uint32_t mid = cnf.num_vars / 2;
  for (auto _ : state) {
    m.swap_adjacent(mid);
    m.swap_adjacent(mid);
  }
  state.counters["nodes"] = static_cast<double>(m.size(root));
}
BENCHMARK(BM_SwapAdjacent)->Arg(16)->Arg(24);

void BM_Algorithm(benchmark::State& state, reorder::Algorithm alg) {
  const Cnf cnf = formula(state.range(0));
  const auto src = reorder::FunctionSource::from_cnf(cnf);
  const Order init = frequency_order(cnf);
  double eta = 0;
  for (auto _ : state) eta = reorder::run(alg, src, init).eta;
  state.counters["eta"] = eta;
}
BENCHMARK_CAPTURE(BM_Algorithm, win2, reorder::Algorithm::Win2)->Arg(12)->Arg(16);
BENCHMARK_CAPTURE(BM_Algorithm, win3, reorder::Algorithm::Win3)->Arg(12)->Arg(16);
BENCHMARK_CAPTURE(BM_Algorithm, sift, reorder::Algorithm::Sift)->Arg(12)->Arg(16);
BENCHMARK_CAPTURE(BM_Algorithm, rand, reorder::Algorithm::Rand)->Arg(12)->Arg(16);
BENCHMARK_CAPTURE(BM_Algorithm, ga, reorder::Algorithm::Ga)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Exhaustive(benchmark::State& state) {
  const auto src = reorder::FunctionSource::from_cnf(formula(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reorder::optimal_order(src).size);
}
BENCHMARK(BM_Exhaustive)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace
