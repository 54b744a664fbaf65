#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperorder/bdd.hpp"
#include "hyperorder/cnf.hpp"
#include "hyperorder/hypergraph.hpp"
#include "hyperorder/nn/model.hpp"
#include "hyperorder/nn/network.hpp"

namespace testsupport {

using namespace hyperorder;

/// Normalized CNF with clause lengths in [1, max_len] over distinct
/// variables; may come out shorter than `clauses` after normalization.
Cnf random_cnf(std::uint32_t n, std::uint32_t clauses, std::uint64_t seed, int max_len = 3);

/// Hyperedges drawn directly: distinct variables followed by bottom padding.
Hypergraph3 random_hypergraph(std::uint32_t n, std::uint32_t edges, std::uint64_t seed);

Order random_order(std::uint32_t n, std::uint64_t seed);

/// assignment[i] is variable i+1; bit i of `mask`.
std::vector<bool> assignment_of(std::uint64_t mask, std::uint32_t n);

/// Truth table of a BDD root, one entry per assignment mask.
std::vector<bool> truth_table(const BddManager& mgr, NodeId root);
/// Truth table by direct clause evaluation.
std::vector<bool> truth_table(const Cnf& cnf);

/// Size of a fresh build of `cnf` under `order`.
std::size_t rebuilt_size(const Cnf& cnf, std::span<const VarId> order);

/// GRU written out coordinate by coordinate, with no shared helpers.
std::vector<double> scalar_gru(const nn::GruCell& cell, const std::vector<double>& h,
                               const std::vector<double>& x);

/// Randomizes every parameter of `model` uniformly in [-scale, scale].
void randomize(nn::Model& model, std::uint64_t seed, double scale);

/// Central-difference derivative of `f` with respect to every parameter, in
/// `for_each_block` order.
std::vector<double> finite_difference_gradient(nn::Model& model,
                                               const std::function<double()>& f, double step);

/// Flattens a model's parameters in `for_each_block` order.
std::vector<double> flatten(const nn::Model& model);

struct GroupCheck {
  std::string group;
  std::size_t parameters = 0;
  /// max over parameters of |analytic - numeric| / max(|analytic|, |numeric|),
  /// counting only parameters whose gradient magnitude exceeds `floor`.
  double max_relative = 0.0;
  /// ||analytic - numeric|| / max(||analytic||, ||numeric||) over the group.
  double norm_relative = 0.0;
  std::size_t skipped = 0;
};

/// Compares accumulate_gradients against central differences of the angle
/// loss on one sample, grouped by parameter_group.
std::vector<GroupCheck> gradient_check(nn::Model& model, const nn::GraphInput& input,
                                       std::span<const double> target, double step,
                                       double floor = 0.0);

}  // namespace testsupport
