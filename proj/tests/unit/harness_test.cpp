#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "hyperorder/error.hpp"
#include "hyperorder/harness.hpp"
#include "oracles.hpp"

using namespace hyperorder;
using namespace hyperorder::harness;

namespace {

const std::vector<LabeledSample>& chain_dataset() {
  static const std::vector<LabeledSample> data = [] {
    const auto seeds = seed_corpus(CorpusConfig{}, 11);
    return gen_dataset(seeds, 20, {}, 12);
  }();
  return data;
}

}  // namespace

TEST(Chain, ThreeCnfForSixVariables) {
  const Cnf c = synth_chain(6);
  ASSERT_EQ(c.clauses.size(), 8u);
  for (const auto& cl : c.clauses) EXPECT_EQ(cl.size(), 3u);
  // x0 v x2 v x4, then x0 v x2 v x5, ..., x1 v x3 v x5.
  const auto vars = [](const Clause& cl) {
    std::vector<std::uint32_t> v;
    for (const auto& l : cl) {
      EXPECT_TRUE(l.positive());
      v.push_back(l.var().index);
    }
    return v;
  };
  EXPECT_EQ(vars(c.clauses.front()), (std::vector<std::uint32_t>{1, 3, 5}));
  EXPECT_EQ(vars(c.clauses[1]), (std::vector<std::uint32_t>{1, 3, 6}));
  EXPECT_EQ(vars(c.clauses.back()), (std::vector<std::uint32_t>{2, 4, 6}));
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    const auto a = testsupport::assignment_of(mask, 6);
    EXPECT_EQ(evaluate(c, a), chain_value(6, a));
  }
  EXPECT_EQ(testsupport::rebuilt_size(c, chain_natural_order(6)), 8u);
  EXPECT_EQ(testsupport::rebuilt_size(c, chain_interleaved_order(6)), 16u);
  EXPECT_THROW(synth_chain(5), std::invalid_argument);
  EXPECT_THROW(synth_chain(0), std::invalid_argument);
  EXPECT_THROW(synth_chain(8), std::invalid_argument);
}

TEST(Chain, DirectBuilderMatchesDnf) {
  for (std::uint32_t n : {2u, 4u, 8u, 10u}) {
    BddManager m(n, testsupport::random_order(n, n));
    const NodeId f = build_chain(m, n);
    const auto t = testsupport::truth_table(m, f);
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask)
      ASSERT_EQ(t[mask], chain_value(n, testsupport::assignment_of(mask, n)));
  }
  EXPECT_THROW(chain_natural_order(7), std::invalid_argument);
}

TEST(Corpus, RelabelAndRandom) {
  const Cnf c = synth_chain(4);
  const Order map{VarId{3}, VarId{1}, VarId{4}, VarId{2}};
  const Cnf r = relabel(c, map);
  EXPECT_EQ(r.clauses[0][0].var(), VarId{3});
  EXPECT_THROW(relabel(c, Order{VarId{1}, VarId{1}, VarId{2}, VarId{3}}), std::invalid_argument);
  const Cnf x = random_3cnf(9, 20, 4);
  EXPECT_TRUE(is_normalized(x));
  EXPECT_EQ(x, random_3cnf(9, 20, 4));
  CorpusConfig cfg;
  cfg.chain_seeds = 3;
  cfg.random_seeds = 4;
  const auto corpus = seed_corpus(cfg, 1);
  ASSERT_EQ(corpus.size(), 7u);
  EXPECT_EQ(corpus[0].num_vars, 6u);
  EXPECT_EQ(corpus[1].num_vars, 4u);
  for (std::size_t i = 3; i < 7; ++i) {
    EXPECT_GE(corpus[i].num_vars, cfg.min_vars);
    EXPECT_LE(corpus[i].num_vars, cfg.max_vars);
  }
}

TEST(Dataset, SeedsOnlyWithZeroMutations) {
  const auto seeds = seed_corpus(CorpusConfig{}, 2);
  const auto data = gen_dataset(seeds, 0, {}, 3);
  ASSERT_EQ(data.size(), seeds.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(data[i].cnf, normalize(seeds[i]));
    EXPECT_EQ(data[i].initial_order, frequency_order(data[i].cnf));
  }
}

TEST(Dataset, ChainFamilyDistinctVerifiedDeterministic) {
  const auto& data = chain_dataset();
  ASSERT_EQ(data.size(), 5u * 21u);
  std::set<std::string> ids;
  for (std::size_t s = 0; s < 5; ++s) {
    std::set<std::vector<Clause>> sets;
    for (std::size_t j = 0; j < 21; ++j) {
      const auto& d = data[s * 21 + j];
      ids.insert(d.id);
      sets.insert(canonical_clause_set(d.cnf));
      EXPECT_LE(d.label_size, d.initial_size);
      EXPECT_TRUE(verify_sample(d)) << d.id;
    }
    EXPECT_EQ(sets.size(), 21u);
  }
  EXPECT_EQ(ids.size(), data.size());
  const auto again = gen_dataset(seed_corpus(CorpusConfig{}, 11), 20, {}, 12);
  EXPECT_EQ(again, data);
}

TEST(Dataset, ImpossibleMutationCountThrows) {
  const Cnf one{1, {{Literal(VarId{1}, true)}}};
  EXPECT_THROW(gen_dataset(std::span<const Cnf>(&one, 1), 5, {}, 1), Error);
}

TEST(Dataset, JsonlRoundTrip) {
  const auto& data = chain_dataset();
  const std::string text = to_jsonl(data);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(data.size()));
  EXPECT_EQ(parse_jsonl(text), data);
  const auto path = std::filesystem::temp_directory_path() / "hyperorder_dataset_test.jsonl";
  save_dataset(path.string(), data);
  EXPECT_EQ(load_dataset(path.string()), data);
  std::filesystem::remove(path);
  EXPECT_THROW(parse_jsonl("{\"id\": 1}\n"), FormatError);
  EXPECT_THROW(parse_jsonl("nope\n"), FormatError);
}

TEST(Dataset, VerifyCatchesWrongSizes) {
  auto d = chain_dataset().front();
  d.label_size += 1;
  EXPECT_FALSE(verify_sample(d));
}

TEST(Split, EightyTwenty) {
  const std::vector<LabeledSample> ten(chain_dataset().begin(), chain_dataset().begin() + 10);
  const auto s = split(ten, 0.8, 5);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);
  std::set<std::string> all;
  for (const auto& x : s.train) all.insert(x.id);
  for (const auto& x : s.test) EXPECT_TRUE(all.insert(x.id).second);
  EXPECT_EQ(all.size(), 10u);
  const auto t = split(ten, 0.8, 5);
  EXPECT_EQ(t.train, s.train);
  EXPECT_EQ(t.test, s.test);
  EXPECT_THROW(split(ten, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(split(ten, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(split(ten, 0.01, 1), std::invalid_argument);
}

TEST(Evaluate, OraclePredictorIsExact) {
  const auto& data = chain_dataset();
  const auto ev = evaluate(oracle_predictor(), data);
  EXPECT_EQ(ev.mean_angle, 0.0);
  EXPECT_EQ(ev.mean_eta_pred, ev.mean_eta_label);
  ASSERT_EQ(ev.rows.size(), data.size());
  for (const auto& r : ev.rows) {
    EXPECT_EQ(r.eta_pred, r.eta_label);
    EXPECT_LE(r.eta_pred, 0.0);
  }
  EXPECT_FALSE(ev.table().empty());
}

TEST(Evaluate, UntrainedModelRespectsAdoption) {
  const auto model = nn::Model::create({8, 8, nn::default_layers()}, nn::Vocabulary::full(), 1);
  const auto ev = evaluate(model, chain_dataset());
  for (const auto& r : ev.rows) {
    EXPECT_LE(r.eta_pred, 0.0);
    EXPECT_GE(r.angle, 0.0);
  }
}

TEST(Bench, EtaColumnsDeterministicAndNonPositive) {
  const std::vector<LabeledSample> some(chain_dataset().begin(), chain_dataset().begin() + 30);
  const std::vector<std::string> algs{"win2", "win3", "sift", "rand", "ga"};
  const auto a = bench(some, algs, nullptr, 4), b = bench(some, algs, nullptr, 4);
  EXPECT_EQ(a.to_tsv(false), b.to_tsv(false));
  EXPECT_TRUE(std::is_sorted(a.rows.begin(), a.rows.end(),
                             [](const BenchRow& x, const BenchRow& y) { return x.id < y.id; }));
  for (const auto& row : a.rows)
    for (const auto& c : row.cells) EXPECT_LE(c.eta, 0.0);
  const std::string tsv = a.to_tsv(true);
  EXPECT_EQ(tsv.rfind("id\tinitial_size\twin2_eta\twin2_size\twin2_seconds", 0), 0u);
  EXPECT_NE(tsv.find("\n\nalgorithm\tmean_eta\tmean_seconds\n"), std::string::npos);
  const std::vector<std::string> bad{"exhaustive"};
  EXPECT_THROW(bench(some, bad, nullptr, 1), std::invalid_argument);
  const std::vector<std::string> pred{"predict"};
  EXPECT_THROW(bench(some, pred, nullptr, 1), std::invalid_argument);
}

TEST(Bench, GaNoWorseThanWin2OnChainFamily) {
  const std::vector<std::string> algs{"win2", "ga"};
  const auto r = bench(chain_dataset(), algs, nullptr, 6);
  for (const auto& row : r.rows) EXPECT_LE(row.cells[1].eta, row.cells[0].eta) << row.id;
  EXPECT_LE(r.mean_eta(1), r.mean_eta(0));
}

TEST(Bench, PredictAtLeastTenTimesFasterThanGa) {
  // Desk-scale random formulas; on the n <= 6 chain family GA is only ~7x
  // slower than a forward pass.
  CorpusConfig cfg;
  cfg.chain_seeds = 0;
  cfg.random_seeds = 4;
  const auto data = gen_dataset(seed_corpus(cfg, 21), 4, {}, 22);
  const auto model = nn::Model::create({16, 16, nn::default_layers()}, nn::Vocabulary::full(), 2);
  const std::vector<std::string> algs{"predict", "ga"};
  const auto r = bench(data, algs, &model, 7);
  EXPECT_LE(10.0 * r.mean_seconds(0), r.mean_seconds(1))
      << "predict " << r.mean_seconds(0) << " ga " << r.mean_seconds(1);
}
