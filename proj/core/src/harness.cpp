#include "hyperorder/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hyperorder/error.hpp"
#include "hyperorder/hypergraph.hpp"
#include "hyperorder/random.hpp"

namespace hyperorder::harness {

namespace {

void check_chain_n(std::uint32_t n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("chain length must be even and at least 2, got " +
                                std::to_string(n));
  }
}

VarId x(std::uint32_t i) { return VarId{i + 1}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string padded(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

Order order_from_json(const nlohmann::json& j) {
  Order out;
  for (const auto& v : j) out.push_back(VarId{v.get<std::uint32_t>()});
  return out;
}

nlohmann::json order_to_json(std::span<const VarId> order) {
  auto j = nlohmann::json::array();
  for (VarId v : order) j.push_back(v.index);
  return j;
}

}  // namespace

Cnf synth_chain(std::uint32_t n) {
  check_chain_n(n);
  if (n > 6) {
    throw std::invalid_argument("chain of length " + std::to_string(n) +
                                " has no 3-CNF expansion; use build_chain");
  }
  const std::uint32_t pairs = n / 2;
  Cnf cnf;
  cnf.num_vars = n;
  for (std::uint32_t choice = 0; choice < (1u << pairs); ++choice) {
    Clause clause;
    for (std::uint32_t p = 0; p < pairs; ++p) {
      const std::uint32_t bit = (choice >> (pairs - 1 - p)) & 1u;
      clause.emplace_back(x(2 * p + bit), true);
    }
    cnf.clauses.push_back(std::move(clause));
  }
  return cnf;
}

NodeId build_chain(BddManager& mgr, std::uint32_t n) {
  check_chain_n(n);
  if (mgr.num_vars() < n) throw std::invalid_argument("manager has too few variables");
  NodeId f = kFalse;
  for (std::uint32_t p = 0; p < n / 2; ++p) {
    f = mgr.bdd_or(f, mgr.bdd_and(mgr.variable(x(2 * p)), mgr.variable(x(2 * p + 1))));
  }
  return f;
}

bool chain_value(std::uint32_t n, const std::vector<bool>& assignment) {
  check_chain_n(n);
  for (std::uint32_t p = 0; p < n / 2; ++p) {
    if (assignment.at(2 * p) && assignment.at(2 * p + 1)) return true;
  }
  return false;
}

reorder::FunctionSource chain_source(std::uint32_t n) {
  check_chain_n(n);
  return {n, [n](BddManager& mgr) { return build_chain(mgr, n); }};
}

Order chain_natural_order(std::uint32_t n) {
  check_chain_n(n);
  return identity_order(n);
}

Order chain_interleaved_order(std::uint32_t n) {
  check_chain_n(n);
  Order out;
  for (std::uint32_t i = 0; i < n; i += 2) out.push_back(x(i));
  for (std::uint32_t i = 1; i < n; i += 2) out.push_back(x(i));
  return out;
}

Cnf relabel(const Cnf& cnf, std::span<const VarId> mapping) {
  validate_order(cnf.num_vars, mapping);
  Cnf out;
  out.num_vars = cnf.num_vars;
  for (const Clause& c : cnf.clauses) {
    Clause nc;
    for (Literal l : c) nc.emplace_back(mapping[l.var().index - 1], l.positive());
    out.clauses.push_back(std::move(nc));
  }
  return out;
}

Cnf random_3cnf(std::uint32_t n, std::uint32_t m, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("random 3-CNF needs at least 3 variables");
  Rng rng(seed);
  Cnf cnf;
  cnf.num_vars = n;
  for (std::uint32_t c = 0; c < m; ++c) {
    std::vector<std::uint32_t> vars;
    while (vars.size() < 3) {
      const auto v = static_cast<std::uint32_t>(rng.index(n)) + 1;
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    Clause clause;
    for (auto v : vars) clause.emplace_back(VarId{v}, rng.chance(0.5));
    cnf.clauses.push_back(std::move(clause));
  }
  return normalize(cnf);
}

std::vector<Cnf> seed_corpus(const CorpusConfig& cfg, std::uint64_t seed) {
  if (cfg.min_vars < 3 || cfg.min_vars > cfg.max_vars || cfg.min_ratio > cfg.max_ratio) {
    throw std::invalid_argument("bad corpus ranges");
  }
  Rng rng(seed);
  std::vector<Cnf> out;
  for (int i = 0; i < cfg.chain_seeds; ++i) {
    const std::uint32_t n = i % 2 == 0 ? 6 : 4;
    Order mapping = identity_order(n);
    rng.shuffle(std::span<VarId>(mapping));
    out.push_back(relabel(synth_chain(n), mapping));
  }
  for (int i = 0; i < cfg.random_seeds; ++i) {
    const auto n = static_cast<std::uint32_t>(rng.between(cfg.min_vars, cfg.max_vars));
    const double ratio = rng.uniform(cfg.min_ratio, cfg.max_ratio);
    const auto m = static_cast<std::uint32_t>(std::llround(ratio * n));
    out.push_back(random_3cnf(n, m, rng.next()));
  }
  return out;
}

LabeledSample label(std::string id, const Cnf& cnf, const reorder::GaConfig& ga,
                    std::uint64_t seed) {
  LabeledSample s;
  s.id = std::move(id);
  s.cnf = cnf;
  s.initial_order = frequency_order(cnf);
  const Order seeds[] = {s.initial_order};
  const reorder::Result r =
      reorder::genetic(reorder::FunctionSource::from_cnf(cnf), seeds, ga, seed);
  s.label_order = r.order;
  s.initial_size = r.initial_size;
  s.label_size = r.final_size;
  return s;
}

std::vector<LabeledSample> gen_dataset(std::span<const Cnf> seeds, int mutations_per_seed,
                                       const reorder::GaConfig& ga, std::uint64_t seed) {
  if (mutations_per_seed < 0) throw std::invalid_argument("mutations_per_seed must be >= 0");
  std::vector<LabeledSample> out;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const Cnf base = normalize(seeds[si]);
    const std::string prefix = "s" + padded(si);
    Rng rng(derive_seed(seed, si));
    out.push_back(label(prefix, base, ga, derive_seed(seed, 1000003 * (si + 1))));

    std::set<std::vector<Clause>> seen{canonical_clause_set(base)};
    int made = 0;
    const long long budget = 50LL * mutations_per_seed;
    for (long long draw = 0; made < mutations_per_seed; ++draw) {
      if (draw >= budget) {
        throw Error("seed " + prefix + ": only " + std::to_string(made) + " of " +
                    std::to_string(mutations_per_seed) + " distinct mutants after " +
                    std::to_string(budget) + " draws");
      }
      const int k = static_cast<int>(rng.between(1, 3));
      Cnf mutant = mutate(base, k, rng.next());
      if (!seen.insert(canonical_clause_set(mutant)).second) continue;
      const std::string id = prefix + "-m" + padded(static_cast<std::size_t>(made));
      out.push_back(label(id, mutant, ga, rng.next()));
      ++made;
    }
  }
  return out;
}

bool verify_sample(const LabeledSample& sample) {
  const auto src = reorder::FunctionSource::from_cnf(sample.cnf);
  return reorder::size_under(src, sample.initial_order) == sample.initial_size &&
         reorder::size_under(src, sample.label_order) == sample.label_size &&
         sample.label_size <= sample.initial_size;
}

std::string to_jsonl(std::span<const LabeledSample> samples) {
  std::string out;
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["dimacs"] = emit_dimacs(s.cnf);
    j["initial_order"] = order_to_json(s.initial_order);
    j["label_order"] = order_to_json(s.label_order);
    j["initial_size"] = s.initial_size;
    j["label_size"] = s.label_size;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledSample> parse_jsonl(const std::string& text) {
  std::vector<LabeledSample> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LabeledSample s;
      s.id = j.at("id").get<std::string>();
      s.cnf = parse_dimacs(j.at("dimacs").get<std::string>());
      s.initial_order = order_from_json(j.at("initial_order"));
      s.label_order = order_from_json(j.at("label_order"));
      s.initial_size = j.at("initial_size").get<std::size_t>();
      s.label_size = j.at("label_size").get<std::size_t>();
      validate_order(s.cnf.num_vars, s.initial_order);
      validate_order(s.cnf.num_vars, s.label_order);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError("dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw FormatError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_dataset(const std::string& path, std::span<const LabeledSample> samples) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_jsonl(samples);
  if (!out) throw Error("write failed: " + path);
}

std::vector<LabeledSample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_jsonl(buf.str());
}

Split split(std::span<const LabeledSample> samples, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must be in (0, 1)");
  }
  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(samples.size())));
  if (n_train == 0 || n_train >= samples.size()) {
    throw std::invalid_argument("split of " + std::to_string(samples.size()) +
                                " samples leaves one side empty");
  }
  Split s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    (i < n_train ? s.train : s.test).push_back(samples[idx[i]]);
  }
  return s;
}

std::vector<nn::Sample> training_samples(std::span<const LabeledSample> samples,
                                         std::uint32_t d_feat) {
  std::vector<nn::Sample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({nn::GraphInput::from_cnf(s.cnf, d_feat), nn::target_depths(s.label_order)});
  }
  return out;
}

Predictor model_predictor(const nn::Model& model) {
  return [&model](const LabeledSample& s) {
    return nn::forward(model, nn::GraphInput::from_cnf(s.cnf, model.d_feat));
  };
}

Predictor oracle_predictor() {
  return [](const LabeledSample& s) { return nn::target_depths(s.label_order); };
}

std::string Evaluation::table() const {
  std::string out = "id\tangle\tpredicted_size\teta_pred\teta_label\n";
  for (const auto& r : rows) {
    out += r.id + '\t' + fixed(r.angle, 6) + '\t' + std::to_string(r.predicted_size) + '\t' +
           fixed(r.eta_pred, 6) + '\t' + fixed(r.eta_label, 6) + '\n';
  }
  out += "\nmean_angle\t" + fixed(mean_angle, 6) + "\nmean_eta_pred\t" + fixed(mean_eta_pred, 6) +
         "\nmean_eta_label\t" + fixed(mean_eta_label, 6) + '\n';
  return out;
}

Evaluation evaluate(const Predictor& predictor, std::span<const LabeledSample> samples) {
  Evaluation ev;
  for (const auto& s : samples) {
    EvalRow row;
    row.id = s.id;
    const nn::DepthVector y = predictor(s);
    row.angle = nn::angle_loss(y, nn::target_depths(s.label_order));
    const Order order = nn::depth_to_order(y);
    const auto src = reorder::FunctionSource::from_cnf(s.cnf);
    const std::size_t size = reorder::size_under(src, order);
    const auto ratio = reorder::compression_ratio(s.initial_size, size);
    row.predicted_size = ratio.adopted ? size : s.initial_size;
    row.eta_pred = ratio.eta;
    row.eta_label = reorder::compression_ratio(s.initial_size, s.label_size).eta;
    ev.rows.push_back(row);
  }
  if (!ev.rows.empty()) {
    const double n = static_cast<double>(ev.rows.size());
    for (const auto& r : ev.rows) {
      ev.mean_angle += r.angle;
      ev.mean_eta_pred += r.eta_pred;
      ev.mean_eta_label += r.eta_label;
    }
    ev.mean_angle /= n;
    ev.mean_eta_pred /= n;
    ev.mean_eta_label /= n;
  }
  return ev;
}

Evaluation evaluate(const nn::Model& model, std::span<const LabeledSample> samples) {
  return evaluate(model_predictor(model), samples);
}

double BenchReport::mean_eta(std::size_t alg) const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.cells.at(alg).eta;
  return sum / static_cast<double>(rows.size());
}

double BenchReport::mean_seconds(std::size_t alg) const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.cells.at(alg).seconds;
  return sum / static_cast<double>(rows.size());
}

std::string BenchReport::to_tsv(bool with_timing) const {
  std::string out = "id\tinitial_size";
  for (const auto& a : algorithms) {
    out += '\t' + a + "_eta\t" + a + "_size";
    if (with_timing) out += '\t' + a + "_seconds";
  }
  out += '\n';
  for (const auto& r : rows) {
    out += r.id + '\t' + std::to_string(r.initial_size);
    for (const auto& c : r.cells) {
      out += '\t' + fixed(c.eta, 6) + '\t' + std::to_string(c.final_size);
      if (with_timing) out += '\t' + sci(c.seconds);
    }
    out += '\n';
  }
  out += with_timing ? "\nalgorithm\tmean_eta\tmean_seconds\n" : "\nalgorithm\tmean_eta\n";
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    out += algorithms[a] + '\t' + fixed(mean_eta(a), 6);
    if (with_timing) out += '\t' + sci(mean_seconds(a));
    out += '\n';
  }
  return out;
}

BenchReport bench(std::span<const LabeledSample> samples, std::span<const std::string> algorithms,
                  const nn::Model* model, std::uint64_t seed, const reorder::RunOptions& base) {
  BenchReport report;
  report.algorithms.assign(algorithms.begin(), algorithms.end());
  std::vector<std::optional<reorder::Algorithm>> algs;
  for (const auto& name : algorithms) {
    if (name == "predict") {
      if (model == nullptr) throw std::invalid_argument("predict needs a model");
      algs.emplace_back();
    } else {
      const auto a = reorder::parse_algorithm(name);
      if (a == reorder::Algorithm::Exhaustive) {
        throw std::invalid_argument("bench does not run the exhaustive oracle");
      }
      algs.emplace_back(a);
    }
  }

  for (std::size_t si = 0; si < samples.size(); ++si) {
    const auto& s = samples[si];
    const auto src = reorder::FunctionSource::from_cnf(s.cnf);
    BenchRow row;
    row.id = s.id;
    row.initial_size = s.initial_size;
    for (std::size_t ai = 0; ai < algs.size(); ++ai) {
      BenchCell cell;
      if (algs[ai]) {
        reorder::RunOptions opts = base;
        opts.seed = derive_seed(seed, si * 16 + ai);
        const auto r = reorder::run(*algs[ai], src, s.initial_order, opts);
        cell = {r.eta, r.seconds, r.final_size};
      } else {
        const auto start = std::chrono::steady_clock::now();
        const auto input = nn::GraphInput::from_cnf(s.cnf, model->d_feat);
        const auto y = nn::forward(*model, input);
        const Order order = nn::depth_to_order(y);
        cell.seconds = seconds_since(start);
        const std::size_t size = reorder::size_under(src, order);
        const auto ratio = reorder::compression_ratio(s.initial_size, size);
        cell.eta = ratio.eta;
        cell.final_size = ratio.adopted ? size : s.initial_size;
      }
      row.cells.push_back(cell);
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const BenchRow& a, const BenchRow& b) { return a.id < b.id; });
  return report;
}

}  // namespace hyperorder::harness
