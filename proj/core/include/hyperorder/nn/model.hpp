#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperorder/hypergraph.hpp"
#include "hyperorder/nn/linalg.hpp"

namespace hyperorder::nn {

struct LayerConfig {
  int timesteps = 1;
  /// Earlier layers whose final states are appended to the GRU input.
  std::vector<int> residual_sources;

  bool operator==(const LayerConfig&) const = default;
};

/// Five layers propagating 2, 2, 1, 2, 1 times; layer 2 reads layer 0 and
/// layer 4 reads layers 0 and 2.
std::vector<LayerConfig> default_layers();

struct ModelConfig {
  std::uint32_t h = 64;
  std::uint32_t d_feat = 64;
  std::vector<LayerConfig> layers = default_layers();
};

/// Frozen set of focus-centred sign keys that own a message matrix. Keys are
/// kept sorted by their string form.
class Vocabulary {
 public:
  Vocabulary() { slot_.fill(-1); }
  explicit Vocabulary(std::vector<SignTriple> keys);

  /// Every key reachable from the given hypergraphs.
  static Vocabulary from_graphs(std::span<const Hypergraph3> graphs);
  /// All 26 keys other than "000".
  static Vocabulary full();

  std::size_t size() const { return keys_.size(); }
  const std::vector<SignTriple>& keys() const { return keys_; }
  /// -1 when absent.
  int slot(SignTriple key) const { return slot_[static_cast<std::size_t>(key.code())]; }
  bool contains(SignTriple key) const { return slot(key) >= 0; }

  bool operator==(const Vocabulary& o) const { return keys_ == o.keys_; }

 private:
  std::vector<SignTriple> keys_;
  std::array<int, kSignTripleCodes> slot_{};
};

/// z = s(Wz x + Uz h + bz), r = s(Wr x + Ur h + br),
/// c = tanh(Wh x + Uh (r*h) + bh), h' = (1 - z) * h + z * c.
struct GruCell {
  Matrix wz, uz, wr, ur, wh, uh;
  std::vector<double> bz, br, bh;

  GruCell() = default;
  GruCell(std::size_t input_dim, std::size_t state_dim);

  std::size_t input_dim() const { return wz.cols(); }
  std::size_t state_dim() const { return uz.rows(); }
};

struct Layer {
  int timesteps = 1;
  std::vector<int> residual_sources;
  /// One h x 2h matrix per vocabulary slot: columns [0, h) act on the left
  /// neighbour, [h, 2h) on the right one.
  std::vector<Matrix> messages;
  GruCell gru;
};

/// Two-layer MLP on [final state, feature]: y = w2 tanh(w1 u + b1) + b2.
struct Readout {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
};

struct Model {
  std::uint32_t h = 0;
  std::uint32_t d_feat = 0;
  Vocabulary vocab;
  std::vector<Layer> layers;
  Readout readout;

  /// Weights uniform in +-1/sqrt(fan_in), biases zero.
  static Model create(const ModelConfig& cfg, Vocabulary vocab, std::uint64_t seed);

  /// Same shapes, every parameter zero (gradient accumulators, ADAM moments).
  Model zeros_like() const;

  ModelConfig config() const;

  /// Visits every parameter block as (name, values) in a fixed order.
  void for_each_block(const std::function<void(const std::string&, std::span<double>)>& fn);
  void for_each_block(
      const std::function<void(const std::string&, std::span<const double>)>& fn) const;

  std::size_t parameter_count() const;

  /// Throws FormatError if any shape disagrees with h, d_feat, vocab or the
  /// layer wiring.
  void validate() const;
};

/// Parameter group of a block name: "message", "gru" or "readout".
std::string parameter_group(const std::string& block_name);

}  // namespace hyperorder::nn
