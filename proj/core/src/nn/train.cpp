#include "hyperorder/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hyperorder/random.hpp"

namespace hyperorder::nn {

namespace {

std::vector<std::span<double>> blocks(Model& m) {
  std::vector<std::span<double>> out;
  m.for_each_block([&](const std::string&, std::span<double> v) { out.push_back(v); });
  return out;
}

std::vector<std::span<const double>> blocks(const Model& m) {
  std::vector<std::span<const double>> out;
  m.for_each_block([&](const std::string&, std::span<const double> v) { out.push_back(v); });
  return out;
}

}  // namespace

Adam::Adam(const Model& shape, const TrainConfig& cfg)
    : cfg_(cfg), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

void Adam::step(Model& model, const Model& grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto params = blocks(model);
  const auto grads = blocks(grad);
  auto ms = blocks(m_);
  auto vs = blocks(v_);
  if (params.size() != grads.size()) throw std::invalid_argument("gradient shape mismatch");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size()) throw std::invalid_argument("gradient shape mismatch");
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double g = grads[b][i];
      ms[b][i] = cfg_.beta1 * ms[b][i] + (1.0 - cfg_.beta1) * g;
      vs[b][i] = cfg_.beta2 * vs[b][i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = ms[b][i] / bc1;
      const double vhat = vs[b][i] / bc2;
      params[b][i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }
}

History train(Model& model, std::span<const Sample> data, const TrainConfig& cfg,
              std::uint64_t seed, const std::function<void(int, double)>& on_epoch) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.epochs < 0 || cfg.batch_size < 1) throw std::invalid_argument("train: bad configuration");
  Rng rng(seed);
  Adam adam(model, cfg);
  History history;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0u);
  Model grad = model.zeros_like();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const double scale = 1.0 / static_cast<double>(end - begin);
      grad.for_each_block([](const std::string&, std::span<double> v) {
        std::fill(v.begin(), v.end(), 0.0);
      });
      for (std::size_t i = begin; i < end; ++i) {
        const Sample& s = data[order[i]];
        total += accumulate_gradients(model, s.input, s.target, grad, scale);
      }
      adam.step(model, grad);
    }
    const double mean = total / static_cast<double>(data.size());
    history.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return history;
}

}  // namespace hyperorder::nn
