// hyperorder: command-line front end for BDD construction, classical
// reordering, dataset generation, training, prediction and benchmarking.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "hyperorder/bdd.hpp"
#include "hyperorder/cnf.hpp"
#include "hyperorder/config.hpp"
#include "hyperorder/error.hpp"
#include "hyperorder/harness.hpp"
#include "hyperorder/hypergraph.hpp"
#include "hyperorder/nn/checkpoint.hpp"
#include "hyperorder/nn/model.hpp"
#include "hyperorder/nn/network.hpp"
#include "hyperorder/nn/train.hpp"
#include "hyperorder/random.hpp"
#include "hyperorder/reorder.hpp"

namespace {

using namespace hyperorder;

// A settable value shared by a CLI flag and a config key. Flags win over the
// config file, which wins over the built-in default.
struct Setting {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const KeyValueConfig&)> from_config;
};

class Settings {
 public:
  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, T& target,
           const std::string& help) {
    Setting s;
    s.key = key;
    s.option = app->add_option(flag, target, help)->capture_default_str();
    s.from_config = [key, &target](const KeyValueConfig& cfg) {
      if constexpr (std::is_same_v<T, std::string>) {
        target = cfg.get(key, target);
      } else if constexpr (std::is_floating_point_v<T>) {
        target = static_cast<T>(cfg.get_double(key, static_cast<double>(target)));
      } else {
        target = static_cast<T>(cfg.get_int(key, static_cast<long long>(target)));
      }
    };
    items_.push_back(std::move(s));
  }

  void add_common(CLI::App* app) {
    add(app, "--seed", "seed", seed, "random seed");
    app->add_option("--config", config_path, "key=value file; command-line flags take precedence");
  }

  /// Applies the config file to every setting whose flag was not given.
  void resolve() const {
    if (config_path.empty()) return;
    const KeyValueConfig cfg = KeyValueConfig::load(config_path);
    std::vector<std::string> known;
    for (const auto& s : items_) known.push_back(s.key);
    const auto unknown = cfg.unknown_keys(known);
    if (!unknown.empty()) throw Error("unknown config key '" + unknown.front() + "'");
    for (const auto& s : items_) {
      if (s.option->count() == 0 && cfg.has(s.key)) s.from_config(cfg);
    }
  }

  std::uint64_t seed = 0;
  std::string config_path;

 private:
  std::vector<Setting> items_;
};

struct GaFlags {
  int population = reorder::GaConfig{}.population;
  int generations = reorder::GaConfig{}.max_generations;
  int stagnation = reorder::GaConfig{}.stagnation_limit;

  void add(CLI::App* app, Settings& s) {
    s.add(app, "--ga-population", "ga_population", population, "GA population size");
    s.add(app, "--ga-generations", "ga_generations", generations, "GA generation limit");
    s.add(app, "--ga-stagnation", "ga_stagnation", stagnation, "GA stagnation limit");
  }

  reorder::GaConfig config() const {
    reorder::GaConfig ga;
    ga.population = population;
    ga.max_generations = generations;
    ga.stagnation_limit = stagnation;
    return ga;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable ordering for BDDs: classical reordering and a hypergraph network"};
  app.require_subcommand(1);

  // build
  Settings build_s;
  std::string build_cnf, build_order, build_out;
  auto* build = app.add_subcommand("build", "build the BDD of a CNF and print its size");
  build->add_option("--cnf", build_cnf, "DIMACS file or -")->required();
  build_s.add(build, "--order", "order", build_order, "order file (default: frequency order)");
  build_s.add(build, "--out", "out", build_out, "write the diagram in DOT format");
  build_s.add_common(build);

  // reorder
  Settings reorder_s;
  std::string reorder_cnf, reorder_order, reorder_out, reorder_alg = "sift";
  reorder::RunOptions reorder_opts;
  GaFlags reorder_ga;
  auto* reorder_cmd = app.add_subcommand("reorder", "run one reordering algorithm");
  reorder_cmd->add_option("--cnf", reorder_cnf, "DIMACS file or -")->required();
  reorder_s.add(reorder_cmd, "--alg", "alg", reorder_alg,
                "win2, win3, sift, rand, ga or exhaustive");
  reorder_s.add(reorder_cmd, "--order", "order", reorder_order,
                "initial order file (default: frequency order)");
  reorder_s.add(reorder_cmd, "--out", "out", reorder_out, "write the resulting order here");
  reorder_s.add(reorder_cmd, "--window-passes", "window_passes", reorder_opts.window_passes,
                "window pass limit");
  reorder_s.add(reorder_cmd, "--max-growth", "max_growth", reorder_opts.max_growth,
                "sifting growth bound");
  reorder_s.add(reorder_cmd, "--rand-trials", "rand_trials_per_var",
                reorder_opts.rand_trials_per_var, "random swap trials per variable");
  reorder_ga.add(reorder_cmd, reorder_s);
  reorder_s.add_common(reorder_cmd);

  // dataset gen
  Settings gen_s;
  harness::CorpusConfig corpus;
  int mutations = 19;
  std::string gen_out;
  std::vector<std::string> gen_seed_files;
  GaFlags gen_ga;
  auto* dataset = app.add_subcommand("dataset", "dataset tools");
  dataset->require_subcommand(1);
  auto* gen = dataset->add_subcommand("gen", "generate a GA-labelled dataset");
  gen_s.add(gen, "--out", "out", gen_out, "dataset file (one JSON record per line)");
  gen->add_option("--cnf", gen_seed_files, "extra seed formulas");
  gen_s.add(gen, "--chains", "chains", corpus.chain_seeds, "relabelled chain seeds");
  gen_s.add(gen, "--randoms", "randoms", corpus.random_seeds, "random 3-CNF seeds");
  gen_s.add(gen, "--min-vars", "min_vars", corpus.min_vars, "random seed variables, lower bound");
  gen_s.add(gen, "--max-vars", "max_vars", corpus.max_vars, "random seed variables, upper bound");
  gen_s.add(gen, "--min-ratio", "min_ratio", corpus.min_ratio, "clause/variable ratio, lower");
  gen_s.add(gen, "--max-ratio", "max_ratio", corpus.max_ratio, "clause/variable ratio, upper");
  gen_s.add(gen, "--mutations", "mutations", mutations, "distinct mutants per seed");
  gen_ga.add(gen, gen_s);
  gen_s.add_common(gen);

  // train
  Settings train_s;
  std::string train_data, train_out, train_eval_out;
  nn::TrainConfig train_cfg;
  std::uint32_t model_h = 16, model_d_feat = 16;
  double train_fraction = 0.8;
  auto* train = app.add_subcommand("train", "train a model on a dataset");
  train_s.add(train, "--data", "data", train_data, "dataset file");
  train_s.add(train, "--out", "out", train_out, "checkpoint to write");
  train_s.add(train, "--eval-out", "eval_out", train_eval_out, "held-out evaluation table");
  train_s.add(train, "--epochs", "epochs", train_cfg.epochs, "training epochs");
  train_s.add(train, "--lr", "lr", train_cfg.learning_rate, "ADAM learning rate");
  train_s.add(train, "--batch", "batch", train_cfg.batch_size, "mini-batch size");
  train_s.add(train, "--hidden", "hidden", model_h, "state dimension h");
  train_s.add(train, "--d-feat", "d_feat", model_d_feat, "feature dimension");
  train_s.add(train, "--train-fraction", "train_fraction", train_fraction,
              "share of samples used for training");
  train_s.add_common(train);

  // predict
  Settings predict_s;
  std::string predict_ckpt, predict_cnf, predict_out;
  auto* predict = app.add_subcommand("predict", "predict a variable order");
  predict_s.add(predict, "--ckpt", "ckpt", predict_ckpt, "model checkpoint");
  predict->add_option("--cnf", predict_cnf, "DIMACS file or -")->required();
  predict_s.add(predict, "--out", "out", predict_out, "also write the order file here");
  predict_s.add_common(predict);

  // bench
  Settings bench_s;
  std::string bench_data, bench_ckpt, bench_out, bench_algs = "win2,win3,sift,rand,ga";
  bool bench_no_timing = false;
  reorder::RunOptions bench_opts;
  GaFlags bench_ga;
  auto* bench = app.add_subcommand("bench", "time and compression table over a dataset");
  bench_s.add(bench, "--data", "data", bench_data, "dataset file");
  bench_s.add(bench, "--ckpt", "ckpt", bench_ckpt, "model checkpoint (enables predict)");
  bench_s.add(bench, "--algs", "algs", bench_algs, "comma-separated algorithms");
  bench_s.add(bench, "--out", "out", bench_out, "table file (default: stdout)");
  bench->add_flag("--no-timing", bench_no_timing, "omit the seconds columns");
  bench_ga.add(bench, bench_s);
  bench_s.add_common(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      build_s.resolve();
      const Cnf cnf = load_dimacs_file(build_cnf);
      const Order order = build_order.empty() ? frequency_order(cnf) : read_order_file(build_order);
      BddManager mgr(cnf.num_vars, order);
      const NodeId root = mgr.build_cnf(cnf);
      std::cout << "vars " << cnf.num_vars << " clauses " << cnf.clauses.size() << " size "
                << mgr.size(root) << "\n";
      if (!build_out.empty()) write_text(build_out, mgr.to_dot(root));
    } else if (reorder_cmd->parsed()) {
      reorder_s.resolve();
      const Cnf cnf = load_dimacs_file(reorder_cnf);
      const Order initial =
          reorder_order.empty() ? frequency_order(cnf) : read_order_file(reorder_order);
      reorder_opts.seed = reorder_s.seed;
      reorder_opts.ga = reorder_ga.config();
      reorder_opts.ga_extra_seeds = {frequency_order(cnf)};
      const auto alg = reorder::parse_algorithm(reorder_alg);
      const auto r =
          reorder::run(alg, reorder::FunctionSource::from_cnf(cnf), initial, reorder_opts);
      std::cout << reorder::algorithm_name(alg) << ' ' << r.initial_size << ' ' << r.final_size
                << ' ' << format_double(r.eta, "%.6f") << ' ' << format_double(r.seconds, "%.6e")
                << "\n";
      if (!reorder_out.empty()) write_order_file(reorder_out, r.order);
    } else if (gen->parsed()) {
      gen_s.resolve();
      if (gen_out.empty()) throw Error("dataset gen needs --out");
      std::vector<Cnf> seeds;
      for (const auto& f : gen_seed_files) seeds.push_back(load_dimacs_file(f));
      const auto corpus_seeds = harness::seed_corpus(corpus, derive_seed(gen_s.seed, 1));
      seeds.insert(seeds.end(), corpus_seeds.begin(), corpus_seeds.end());
      const auto samples =
          harness::gen_dataset(seeds, mutations, gen_ga.config(), derive_seed(gen_s.seed, 2));
      harness::save_dataset(gen_out, samples);
      std::cout << "samples " << samples.size() << "\n";
    } else if (train->parsed()) {
      train_s.resolve();
      if (train_data.empty() || train_out.empty()) throw Error("train needs --data and --out");
      const auto samples = harness::load_dataset(train_data);
      const auto parts = harness::split(samples, train_fraction, derive_seed(train_s.seed, 1));
      nn::ModelConfig mc;
      mc.h = model_h;
      mc.d_feat = model_d_feat;
      nn::Model model = nn::Model::create(mc, nn::Vocabulary::full(), derive_seed(train_s.seed, 2));
      const auto data = harness::training_samples(parts.train, mc.d_feat);
      nn::train(model, data, train_cfg, derive_seed(train_s.seed, 3), [](int epoch, double loss) {
        std::cout << "epoch " << epoch << " loss " << format_double(loss, "%.6f") << "\n";
      });
      nn::save_model(train_out, model);
      const auto ev = harness::evaluate(model, parts.test);
      std::cout << "train " << parts.train.size() << " test " << parts.test.size()
                << " test_angle " << format_double(ev.mean_angle, "%.6f") << " test_eta_pred "
                << format_double(ev.mean_eta_pred, "%.6f") << " test_eta_label "
                << format_double(ev.mean_eta_label, "%.6f") << "\n";
      if (!train_eval_out.empty()) write_text(train_eval_out, ev.table());
    } else if (predict->parsed()) {
      predict_s.resolve();
      if (predict_ckpt.empty()) throw Error("predict needs --ckpt");
      const nn::Model model = nn::load_model(predict_ckpt);
      const Cnf cnf = load_dimacs_file(predict_cnf);
      const auto y = nn::forward(model, nn::GraphInput::from_cnf(cnf, model.d_feat));
      const Order order = nn::depth_to_order(y);
      std::cout << format_order(order);
      if (!predict_out.empty()) write_order_file(predict_out, order);
    } else if (bench->parsed()) {
      bench_s.resolve();
      if (bench_data.empty()) throw Error("bench needs --data");
      const auto samples = harness::load_dataset(bench_data);
      std::vector<std::string> algs = split_list(bench_algs);
      std::optional<nn::Model> model;
      if (!bench_ckpt.empty()) {
        model = nn::load_model(bench_ckpt);
        if (std::find(algs.begin(), algs.end(), "predict") == algs.end()) {
          algs.push_back("predict");
        }
      }
      bench_opts.ga = bench_ga.config();
      const auto report = harness::bench(samples, algs, model ? &*model : nullptr, bench_s.seed,
                                         bench_opts);
      write_text(bench_out, report.to_tsv(!bench_no_timing));
    }
  } catch (const std::exception& e) {
    std::cerr << "hyperorder: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
