#include "hyperorder/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "hyperorder/error.hpp"
#include "hyperorder/random.hpp"

namespace hyperorder::nn {

std::vector<LayerConfig> default_layers() {
  return {{2, {}}, {2, {}}, {1, {0}}, {2, {}}, {1, {0, 2}}};
}

Vocabulary::Vocabulary(std::vector<SignTriple> keys) : keys_(std::move(keys)) {
  std::sort(keys_.begin(), keys_.end(),
            [](const SignTriple& a, const SignTriple& b) { return a.str() < b.str(); });
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  slot_.fill(-1);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    slot_[static_cast<std::size_t>(keys_[i].code())] = static_cast<int>(i);
  }
}

Vocabulary Vocabulary::from_graphs(std::span<const Hypergraph3> graphs) {
  std::set<int> codes;
  for (const auto& hg : graphs) {
    for (const auto& list : neighbor_table(hg))
      for (const auto& p : list) codes.insert(p.key.code());
  }
  std::vector<SignTriple> keys;
  for (int c : codes) keys.push_back(SignTriple::from_code(c));
  return Vocabulary(std::move(keys));
}

Vocabulary Vocabulary::full() {
  std::vector<SignTriple> keys;
  const int zero_code = SignTriple{}.code();
  for (int c = 0; c < kSignTripleCodes; ++c)
    if (c != zero_code) keys.push_back(SignTriple::from_code(c));
  return Vocabulary(std::move(keys));
}

GruCell::GruCell(std::size_t input_dim, std::size_t state_dim)
    : wz(state_dim, input_dim),
      uz(state_dim, state_dim),
      wr(state_dim, input_dim),
      ur(state_dim, state_dim),
      wh(state_dim, input_dim),
      uh(state_dim, state_dim),
      bz(state_dim, 0.0),
      br(state_dim, 0.0),
      bh(state_dim, 0.0) {}

namespace {

void fill_uniform(Matrix& m, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
}

template <class M, class Fn>
void visit_blocks(M& model, Fn&& fn) {
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (std::size_t k = 0; k < layer.messages.size(); ++k) {
      fn(prefix + "message." + model.vocab.keys()[k].str(), layer.messages[k].values());
    }
    auto& g = layer.gru;
    fn(prefix + "gru.wz", g.wz.values());
    fn(prefix + "gru.uz", g.uz.values());
    fn(prefix + "gru.bz", std::span(g.bz));
    fn(prefix + "gru.wr", g.wr.values());
    fn(prefix + "gru.ur", g.ur.values());
    fn(prefix + "gru.br", std::span(g.br));
    fn(prefix + "gru.wh", g.wh.values());
    fn(prefix + "gru.uh", g.uh.values());
    fn(prefix + "gru.bh", std::span(g.bh));
  }
  fn(std::string("readout.w1"), model.readout.w1.values());
  fn(std::string("readout.b1"), std::span(model.readout.b1));
  fn(std::string("readout.w2"), model.readout.w2.values());
  fn(std::string("readout.b2"), std::span(model.readout.b2));
}

void check_layers(std::uint32_t h, std::uint32_t d_feat, const std::vector<LayerConfig>& layers) {
  if (h == 0) throw std::invalid_argument("state dimension must be positive");
  if (d_feat > h) throw std::invalid_argument("d_feat must not exceed h");
  if (layers.empty()) throw std::invalid_argument("model needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].timesteps < 1) throw std::invalid_argument("timesteps must be >= 1");
    for (int src : layers[l].residual_sources) {
      if (src < 0 || static_cast<std::size_t>(src) >= l) {
        throw std::invalid_argument("residual source of layer " + std::to_string(l) +
                                    " must be an earlier layer");
      }
    }
  }
}

}  // namespace

Model Model::create(const ModelConfig& cfg, Vocabulary vocab, std::uint64_t seed) {
  check_layers(cfg.h, cfg.d_feat, cfg.layers);
  Rng rng(seed);
  Model m;
  m.h = cfg.h;
  m.d_feat = cfg.d_feat;
  m.vocab = std::move(vocab);
  for (const auto& lc : cfg.layers) {
    Layer layer;
    layer.timesteps = lc.timesteps;
    layer.residual_sources = lc.residual_sources;
    for (std::size_t k = 0; k < m.vocab.size(); ++k) {
      Matrix msg(cfg.h, 2 * cfg.h);
      fill_uniform(msg, rng);
      layer.messages.push_back(std::move(msg));
    }
    layer.gru = GruCell(cfg.h * (1 + lc.residual_sources.size()), cfg.h);
    for (Matrix* w : {&layer.gru.wz, &layer.gru.uz, &layer.gru.wr, &layer.gru.ur, &layer.gru.wh,
                      &layer.gru.uh}) {
      fill_uniform(*w, rng);
    }
    m.layers.push_back(std::move(layer));
  }
  m.readout.w1 = Matrix(cfg.h, cfg.h + cfg.d_feat);
  m.readout.b1.assign(cfg.h, 0.0);
  m.readout.w2 = Matrix(1, cfg.h);
  m.readout.b2.assign(1, 0.0);
  fill_uniform(m.readout.w1, rng);
  fill_uniform(m.readout.w2, rng);
  return m;
}

Model Model::zeros_like() const {
  Model z = *this;
  z.for_each_block([](const std::string&, std::span<double> v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  return z;
}

ModelConfig Model::config() const {
  ModelConfig cfg;
  cfg.h = h;
  cfg.d_feat = d_feat;
  cfg.layers.clear();
  for (const auto& l : layers) cfg.layers.push_back({l.timesteps, l.residual_sources});
  return cfg;
}

void Model::for_each_block(const std::function<void(const std::string&, std::span<double>)>& fn) {
  visit_blocks(*this, fn);
}

void Model::for_each_block(
    const std::function<void(const std::string&, std::span<const double>)>& fn) const {
  visit_blocks(*this, fn);
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for_each_block([&](const std::string&, std::span<const double> v) { n += v.size(); });
  return n;
}

void Model::validate() const {
  try {
    check_layers(h, d_feat, config().layers);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
  auto expect = [](bool ok, const std::string& what) {
    if (!ok) throw FormatError("invalid model: " + what);
  };
  auto shape = [&](const Matrix& m, std::size_t r, std::size_t c, const std::string& what) {
    expect(m.rows() == r && m.cols() == c && m.values().size() == r * c, what + " has wrong shape");
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string name = "layer " + std::to_string(l);
    expect(layer.messages.size() == vocab.size(), name + " message count != vocabulary size");
    for (const auto& m : layer.messages) shape(m, h, 2 * h, name + " message matrix");
    const std::size_t din = h * (1 + layer.residual_sources.size());
    const auto& g = layer.gru;
    shape(g.wz, h, din, name + " gru.wz");
    shape(g.wr, h, din, name + " gru.wr");
    shape(g.wh, h, din, name + " gru.wh");
    shape(g.uz, h, h, name + " gru.uz");
    shape(g.ur, h, h, name + " gru.ur");
    shape(g.uh, h, h, name + " gru.uh");
    expect(g.bz.size() == h && g.br.size() == h && g.bh.size() == h, name + " gru bias length");
  }
  shape(readout.w1, h, h + d_feat, "readout.w1");
  shape(readout.w2, 1, h, "readout.w2");
  expect(readout.b1.size() == h && readout.b2.size() == 1, "readout bias length");
}

std::string parameter_group(const std::string& block_name) {
  if (block_name.rfind("readout.", 0) == 0) return "readout";
  if (block_name.find(".message.") != std::string::npos) return "message";
  return "gru";
}

}  // namespace hyperorder::nn
