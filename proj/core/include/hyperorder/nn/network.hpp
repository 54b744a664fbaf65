#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hyperorder/bdd.hpp"
#include "hyperorder/cnf.hpp"
#include "hyperorder/hypergraph.hpp"
#include "hyperorder/nn/linalg.hpp"
#include "hyperorder/nn/model.hpp"

namespace hyperorder::nn {

/// Entry i is the depth of variable i+1; smaller depth means earlier in the
/// order.
using DepthVector = std::vector<double>;

/// A formula prepared for the network: hypergraph, features, and each node's
/// NBR_H list in canonical summation order.
struct GraphInput {
  Hypergraph3 graph;
  FeatureAssignment features;
  std::vector<std::vector<NeighborPair>> neighbors;

  GraphInput(Hypergraph3 graph, FeatureAssignment features);
  static GraphInput from_cnf(const Cnf& cnf, std::uint32_t d_feat);

  std::uint32_t node_count() const { return graph.node_count(); }
  std::uint32_t num_vars() const { return graph.num_vars; }
};

/// Row v holds the feature of node v followed by zeros; row 0 (bottom) is zero.
Matrix init_state(const GraphInput& input, std::uint32_t h);

/// Hyperedge messages of one layer: for every node, the average over NBR_H of
/// M_k [h_left; h_right], k the focus-centred key. Nodes without neighbours
/// get a zero message. Throws VocabularyError on an unknown key.
Matrix messages(const Model& model, std::size_t layer, const GraphInput& input,
                const Matrix& states);

/// The same messages computed as two ordinary message passes: left blocks
/// over the derived graph plus right blocks over its reverse.
Matrix messages_derived(const Model& model, std::size_t layer, const DerivedGraph& forward,
                        const DerivedGraph& reverse, const Matrix& states);

std::vector<double> gru_update(const GruCell& cell, std::span<const double> state,
                               std::span<const double> input);

struct StepTrace {
  Matrix state;  // before the step
  Matrix input;  // GRU input: message then residual states
  Matrix z, r, c;
};

struct LayerTrace {
  std::vector<StepTrace> steps;
  Matrix final_state;
};

/// Everything backpropagation needs from one forward run.
struct Trace {
  std::vector<LayerTrace> layers;
  Matrix readout_input;   // row v-1: [final state of v, feature of v]
  Matrix readout_hidden;  // row v-1: tanh(w1 u + b1)
};

DepthVector forward(const Model& model, const GraphInput& input, Trace* trace = nullptr);

/// Angle between the vectors in degrees, in [0, 180]. Throws on a zero vector.
double angle_loss(std::span<const double> y, std::span<const double> target);

/// d loss / d y, with the cosine clamped to [-1 + 1e-7, 1 - 1e-7] inside the
/// arccos derivative so the result is finite everywhere.
std::vector<double> angle_loss_gradient(std::span<const double> y, std::span<const double> target);

inline constexpr double kCosineClamp = 1e-7;

/// Runs forward and backward for one sample, adding scale * d loss / d theta
/// into `grad` (shaped like `model`). Returns the loss.
double accumulate_gradients(const Model& model, const GraphInput& input,
                            std::span<const double> target, Model& grad, double scale = 1.0);

/// Ascending depth; exact ties by ascending VarId.
Order depth_to_order(std::span<const double> depths);

/// Variable at position i gets depth i + 1.
DepthVector target_depths(std::span<const VarId> order);

}  // namespace hyperorder::nn
