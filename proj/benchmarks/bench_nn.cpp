#include <benchmark/benchmark.h>

#include "hyperorder/harness.hpp"
#include "hyperorder/nn/network.hpp"

using namespace hyperorder;

namespace {

struct Fixture {
  Cnf cnf;
  nn::Model model;
  nn::GraphInput input;
  std::vector<double> target;

  Fixture(std::uint32_t n, std::uint32_t h)
      : cnf(harness::random_3cnf(n, static_cast<std::uint32_t>(2.2 * n), 5)),
        model(nn::Model::create({h, std::min(h, 16u), nn::default_layers()}, nn::Vocabulary::full(), 1)),
        input(nn::GraphInput::from_cnf(cnf, std::min(h, 16u))),
        target(nn::target_depths(frequency_order(cnf))) {}
};

void BM_Forward(benchmark::State& state) {
  Fixture f(static_cast<std::uint32_t>(state.range(0)), static_cast<std::uint32_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward(f.model, f.input));
}
BENCHMARK(BM_Forward)->Args({16, 16})->Args({16, 64})->Args({64, 16});

void BM_Predict(benchmark::State& state) {
  Fixture f(static_cast<std::uint32_t>(state.range(0)), 16);
  for (auto _ : state) {
    const auto in = nn::GraphInput::from_cnf(f.cnf, 16);
    benchmark::DoNotOptimize(nn::depth_to_order(nn::forward(f.model, in)));
  }
}
BENCHMARK(BM_Predict)->Arg(16)->Arg(64);

void BM_Gradient(benchmark::State& state) {
  Fixture f(static_cast<std::uint32_t>(state.range(0)), static_cast<std::uint32_t>(state.range(1)));
  nn::Model grad = f.model.zeros_like();
  for (auto _ : state) benchmark::DoNotOptimize(nn::accumulate_gradients(f.model, f.input, f.target, grad));
}
BENCHMARK(BM_Gradient)->Args({16, 16})->Args({16, 64});

}  // namespace

BENCHMARK_MAIN();
