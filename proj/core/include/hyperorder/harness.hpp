#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperorder/bdd.hpp"
#include "hyperorder/cnf.hpp"
#include "hyperorder/nn/model.hpp"
#include "hyperorder/nn/network.hpp"
#include "hyperorder/nn/train.hpp"
#include "hyperorder/reorder.hpp"

namespace hyperorder::harness {

// Chain family f = x0 x1 | x2 x3 | ... | x{n-2} x{n-1}, with x_i as VarId i+1.

/// Product-of-sums expansion of the chain, first pair varying slowest.
/// Pure 3-CNF only exists for n <= 6; throws for odd n, n < 2 or n > 6.
Cnf synth_chain(std::uint32_t n);

/// The chain built directly from its DNF, for any even n.
NodeId build_chain(BddManager& mgr, std::uint32_t n);
/// Truth of the chain DNF; assignment[i] is x_i.
bool chain_value(std::uint32_t n, const std::vector<bool>& assignment);
reorder::FunctionSource chain_source(std::uint32_t n);

/// 1, 2, ..., n: pair members adjacent.
Order chain_natural_order(std::uint32_t n);
/// 1, 3, 5, ..., 2, 4, 6, ...: every first member before every second.
Order chain_interleaved_order(std::uint32_t n);

/// Renames variable v to mapping[v-1]; mapping must be a permutation.
Cnf relabel(const Cnf& cnf, std::span<const VarId> mapping);

/// m clauses over three distinct random variables with random signs,
/// normalized.
Cnf random_3cnf(std::uint32_t n, std::uint32_t m, std::uint64_t seed);

struct CorpusConfig {
  int chain_seeds = 5;
  int random_seeds = 0;
  std::uint32_t min_vars = 8;
  std::uint32_t max_vars = 16;
  double min_ratio = 1.6;
  double max_ratio = 2.9;
};

/// Seed formulas: randomly relabelled chains (n = 6 and 4, alternating) and
/// random 3-CNFs with n and clause/variable ratio drawn from the ranges.
std::vector<Cnf> seed_corpus(const CorpusConfig& cfg, std::uint64_t seed);

struct LabeledSample {
  std::string id;
  Cnf cnf;
  Order initial_order;
  Order label_order;
  std::size_t initial_size = 0;
  std::size_t label_size = 0;

  bool operator==(const LabeledSample&) const = default;
};

/// GA label for one formula, starting from its frequency order.
LabeledSample label(std::string id, const Cnf& cnf, const reorder::GaConfig& ga,
                    std::uint64_t seed);

/// Each seed followed by `mutations_per_seed` distinct mutants (1 to 3
/// flipped occurrences each). Throws Error when 50 * m draws do not yield m
/// distinct mutants.
std::vector<LabeledSample> gen_dataset(std::span<const Cnf> seeds, int mutations_per_seed,
                                       const reorder::GaConfig& ga, std::uint64_t seed);

/// Rebuilds both orders and checks the recorded sizes.
bool verify_sample(const LabeledSample& sample);

std::string to_jsonl(std::span<const LabeledSample> samples);
std::vector<LabeledSample> parse_jsonl(const std::string& text);
void save_dataset(const std::string& path, std::span<const LabeledSample> samples);
std::vector<LabeledSample> load_dataset(const std::string& path);

struct Split {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
};

/// Seeded shuffle, then the first round(fraction * size) go to train.
Split split(std::span<const LabeledSample> samples, double train_fraction, std::uint64_t seed);

std::vector<nn::Sample> training_samples(std::span<const LabeledSample> samples,
                                         std::uint32_t d_feat);

using Predictor = std::function<nn::DepthVector(const LabeledSample&)>;

Predictor model_predictor(const nn::Model& model);
/// Returns the label's own target depths.
Predictor oracle_predictor();

struct EvalRow {
  std::string id;
  double angle = 0.0;
  std::size_t predicted_size = 0;
  double eta_pred = 0.0;
  double eta_label = 0.0;
};

struct Evaluation {
  double mean_angle = 0.0;
  double mean_eta_pred = 0.0;
  double mean_eta_label = 0.0;
  std::vector<EvalRow> rows;

  std::string table() const;
};

Evaluation evaluate(const Predictor& predictor, std::span<const LabeledSample> samples);
Evaluation evaluate(const nn::Model& model, std::span<const LabeledSample> samples);

struct BenchCell {
  double eta = 0.0;
  double seconds = 0.0;
  std::size_t final_size = 0;
};

struct BenchRow {
  std::string id;
  std::size_t initial_size = 0;
  std::vector<BenchCell> cells;  // one per algorithm, in report order
};

struct BenchReport {
  std::vector<std::string> algorithms;
  std::vector<BenchRow> rows;

  double mean_eta(std::size_t alg) const;
  double mean_seconds(std::size_t alg) const;
  /// Header, one row per sample, blank line, summary. Without timing the
  /// table is reproducible byte for byte.
  std::string to_tsv(bool with_timing = true) const;
};

/// Algorithms are names from {win2, win3, sift, rand, ga, predict}; predict
/// needs a model. Seconds cover reordering only (predict: encoding, forward
/// pass and sort); initial construction and size measurement are excluded.
BenchReport bench(std::span<const LabeledSample> samples, std::span<const std::string> algorithms,
                  const nn::Model* model, std::uint64_t seed,
                  const reorder::RunOptions& base = {});

}  // namespace hyperorder::harness
