#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hyperorder/nn/model.hpp"
#include "hyperorder/nn/network.hpp"

namespace hyperorder::nn {

struct Sample {
  GraphInput input;
  DepthVector target;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 100;
  int batch_size = 8;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct History {
  /// Mean loss over the samples seen in each epoch (evaluated before the
  /// update of their batch).
  std::vector<double> epoch_loss;
};

class Adam {
 public:
  Adam(const Model& shape, const TrainConfig& cfg);
  /// One update from a gradient shaped like the model.
  void step(Model& model, const Model& grad);
  long long steps() const { return t_; }

 private:
  TrainConfig cfg_;
  Model m_, v_;
  long long t_ = 0;
};

/// Mini-batch ADAM on the mean angle loss, seeded shuffle each epoch. The
/// optional callback sees (epoch, mean loss) after every epoch.
History train(Model& model, std::span<const Sample> data, const TrainConfig& cfg,
              std::uint64_t seed,
              const std::function<void(int, double)>& on_epoch = {});

}  // namespace hyperorder::nn
