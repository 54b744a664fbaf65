#include "hyperorder/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hyperorder/error.hpp"

namespace hyperorder::nn {

namespace {

bool canonical_less(const NeighborPair& a, const NeighborPair& b) {
  if (a.key.code() != b.key.code()) return a.key.code() < b.key.code();
  if (a.left != b.left) return a.left < b.left;
  return a.right < b.right;
}

// Calls fn(begin, end) for each run of equal keys in a canonical list.
template <class Fn>
void for_each_key_run(const std::vector<NeighborPair>& list, Fn&& fn) {
  for (std::size_t b = 0; b < list.size();) {
    std::size_t e = b + 1;
    while (e < list.size() && list[e].key == list[b].key) ++e;
    fn(b, e);
    b = e;
  }
}

// Sum of [h_left; h_right] over list[b, e).
void sum_pairs(const std::vector<NeighborPair>& list, std::size_t b, std::size_t e,
               const Matrix& states, std::span<double> out) {
  const std::size_t h = states.cols();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = b; i < e; ++i) {
    const auto l = states.row(list[i].left.id), r = states.row(list[i].right.id);
    for (std::size_t c = 0; c < h; ++c) {
      out[c] += l[c];
      out[h + c] += r[c];
    }
  }
}

const Matrix& message_matrix(const Model& model, std::size_t layer, SignTriple key) {
  const int slot = model.vocab.slot(key);
  if (slot < 0) {
    throw VocabularyError("sign key " + key.str() + " is not in the model vocabulary");
  }
  return model.layers[layer].messages[static_cast<std::size_t>(slot)];
}

void check_layer(const Model& model, std::size_t layer) {
  if (layer >= model.layers.size()) throw std::out_of_range("layer index out of range");
}

void copy_into(std::span<const double> src, std::span<double> dst) {
  std::copy(src.begin(), src.end(), dst.begin());
}

}  // namespace

GraphInput::GraphInput(Hypergraph3 g, FeatureAssignment f)
    : graph(std::move(g)), features(std::move(f)), neighbors(neighbor_table(graph)) {
  if (features.num_vars() != graph.num_vars) {
    throw std::invalid_argument("features and hypergraph disagree on the variable count");
  }
  // Content order rather than edge order: the summation sequence, and hence
  // every floating-point result, is independent of clause order.
  for (auto& list : neighbors) std::sort(list.begin(), list.end(), canonical_less);
}

GraphInput GraphInput::from_cnf(const Cnf& cnf, std::uint32_t d_feat) {
  return GraphInput(cnf_to_hypergraph(cnf), feature_rank(cnf, d_feat));
}

Matrix init_state(const GraphInput& input, std::uint32_t h) {
  if (input.features.d_feat() > h) throw std::invalid_argument("d_feat exceeds state dimension");
  Matrix s(input.node_count(), h);
  for (std::uint32_t v = 1; v < input.node_count(); ++v) {
    const auto a = input.features.feature(HNode{v});
    std::copy(a.begin(), a.end(), s.row(v).begin());
  }
  return s;
}

Matrix messages(const Model& model, std::size_t layer, const GraphInput& input,
                const Matrix& states) {
  check_layer(model, layer);
  const std::size_t h = model.h;
  if (states.rows() != input.node_count() || states.cols() != h) {
    throw std::invalid_argument("messages: state matrix has wrong shape");
  }
  Matrix out(input.node_count(), h);
  std::vector<double> pair(2 * h);
  for (std::uint32_t v = 0; v < input.node_count(); ++v) {
    const auto& list = input.neighbors[v];
    if (list.empty()) continue;
    const double lambda = 1.0 / static_cast<double>(list.size());
    // M_k is linear, so entries sharing a key are summed before the product.
    for_each_key_run(list, [&](std::size_t b, std::size_t e) {
      const Matrix& m = message_matrix(model, layer, list[b].key);
      sum_pairs(list, b, e, states, pair);
      gemv_add(m, pair, out.row(v), lambda);
    });
  }
  return out;
}

Matrix messages_derived(const Model& model, std::size_t layer, const DerivedGraph& forward,
                        const DerivedGraph& reverse, const Matrix& states) {
  check_layer(model, layer);
  const std::size_t h = model.h;
  const std::size_t n = states.rows();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& a : forward.arcs) ++indegree.at(a.to.id);

  Matrix out(n, h);
  auto pass = [&](const DerivedGraph& g, std::size_t column_offset) {
    for (const auto& a : g.arcs) {
      const Matrix& m = message_matrix(model, layer, a.key);
      const double lambda = 1.0 / static_cast<double>(indegree[a.to.id]);
      const auto x = states.row(a.from.id);
      auto y = out.row(a.to.id);
      for (std::size_t r = 0; r < h; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < h; ++c) acc += m(r, column_offset + c) * x[c];
        y[r] += lambda * acc;
      }
    }
  };
  pass(forward, 0);
  pass(reverse, h);
  return out;
}

namespace {

struct GruScratch {
  std::vector<double> z, r, c, rh, out;
  explicit GruScratch(std::size_t n) : z(n), r(n), c(n), rh(n), out(n) {}
};

void gru_step(const GruCell& cell, std::span<const double> h, std::span<const double> x,
              GruScratch& a) {
  const std::size_t n = cell.state_dim();
  if (h.size() != n || x.size() != cell.input_dim()) {
    throw std::invalid_argument("gru_update: input or state has wrong length");
  }
  copy_into(cell.bz, a.z);
  copy_into(cell.br, a.r);
  copy_into(cell.bh, a.c);
  gemv_add(cell.wz, x, a.z);
  gemv_add(cell.uz, h, a.z);
  gemv_add(cell.wr, x, a.r);
  gemv_add(cell.ur, h, a.r);
  for (std::size_t i = 0; i < n; ++i) {
    a.z[i] = sigmoid(a.z[i]);
    a.r[i] = sigmoid(a.r[i]);
    a.rh[i] = a.r[i] * h[i];
  }
  gemv_add(cell.wh, x, a.c);
  gemv_add(cell.uh, a.rh, a.c);
  for (std::size_t i = 0; i < n; ++i) {
    a.c[i] = std::tanh(a.c[i]);
    a.out[i] = (1.0 - a.z[i]) * h[i] + a.z[i] * a.c[i];
  }
}

}  // namespace

std::vector<double> gru_update(const GruCell& cell, std::span<const double> state,
                               std::span<const double> input) {
  GruScratch a(cell.state_dim());
  gru_step(cell, state, input, a);
  return a.out;
}

DepthVector forward(const Model& model, const GraphInput& input, Trace* trace) {
  if (input.features.d_feat() != model.d_feat) {
    throw std::invalid_argument("input features do not match the model's d_feat");
  }
  const std::size_t h = model.h;
  const std::size_t n = input.node_count();
  Matrix state = init_state(input, model.h);
  std::vector<Matrix> finals;
  GruScratch a(h);
  if (trace) trace->layers.assign(model.layers.size(), {});

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Layer& layer = model.layers[l];
    const std::size_t din = layer.gru.input_dim();
    for (int t = 0; t < layer.timesteps; ++t) {
      const Matrix msg = messages(model, l, input, state);
      Matrix x(n, din);
      for (std::size_t v = 0; v < n; ++v) {
        auto row = x.row(v);
        copy_into(msg.row(v), row.first(h));
        for (std::size_t s = 0; s < layer.residual_sources.size(); ++s) {
          const auto src = static_cast<std::size_t>(layer.residual_sources[s]);
          copy_into(finals[src].row(v), row.subspan(h * (1 + s), h));
        }
      }
      Matrix next(n, h);
      StepTrace step;
      if (trace) {
        step.z = Matrix(n, h);
        step.r = Matrix(n, h);
        step.c = Matrix(n, h);
      }
      for (std::size_t v = 0; v < n; ++v) {
        gru_step(layer.gru, state.row(v), x.row(v), a);
        copy_into(a.out, next.row(v));
        if (trace) {
          copy_into(a.z, step.z.row(v));
          copy_into(a.r, step.r.row(v));
          copy_into(a.c, step.c.row(v));
        }
      }
      if (trace) {
        step.state = std::move(state);
        step.input = std::move(x);
        trace->layers[l].steps.push_back(std::move(step));
      }
      state = std::move(next);
    }
    finals.push_back(state);
    if (trace) trace->layers[l].final_state = state;
  }

  const std::size_t vars = input.num_vars();
  const std::size_t din = h + model.d_feat;
  DepthVector y(vars);
  Matrix u_all(vars, din), hid_all(vars, h);
  for (std::size_t v = 1; v <= vars; ++v) {
    auto u = u_all.row(v - 1);
    copy_into(state.row(v), u.first(h));
    const auto a = input.features.feature(HNode{static_cast<std::uint32_t>(v)});
    copy_into(a, u.subspan(h));
    auto hid = hid_all.row(v - 1);
    copy_into(model.readout.b1, hid);
    gemv_add(model.readout.w1, u, hid);
    for (double& e : hid) e = std::tanh(e);
    y[v - 1] = dot(model.readout.w2.row(0), hid) + model.readout.b2[0];
  }
  if (trace) {
    trace->readout_input = std::move(u_all);
    trace->readout_hidden = std::move(hid_all);
  }
  return y;
}

namespace {

constexpr double kDegrees = 180.0 / std::numbers::pi;

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void check_pair(std::span<const double> y, std::span<const double> t) {
  if (y.size() != t.size()) throw std::invalid_argument("angle_loss: length mismatch");
}

}  // namespace

double angle_loss(std::span<const double> y, std::span<const double> target) {
  check_pair(y, target);
  const double ny = norm(y), nt = norm(target);
  if (!(ny > 0.0) || !(nt > 0.0)) throw std::invalid_argument("angle_loss: zero-norm vector");
  // 2 atan2(|u - v|, |u + v|) for unit u, v equals arccos(u . v) but keeps
  // full precision near 0 and 180 degrees.
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = y[i] / ny, v = target[i] / nt;
    diff += (u - v) * (u - v);
    sum += (u + v) * (u + v);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum)) * kDegrees;
}

std::vector<double> angle_loss_gradient(std::span<const double> y,
                                        std::span<const double> target) {
  check_pair(y, target);
  const double ny = norm(y), nt = norm(target);
  if (!(ny > 0.0) || !(nt > 0.0)) throw std::invalid_argument("angle_loss: zero-norm vector");
  const double cosine = dot(y, target) / (ny * nt);
  const double clamped = std::clamp(cosine, -1.0 + kCosineClamp, 1.0 - kCosineClamp);
  const double outer = -kDegrees / std::sqrt(1.0 - clamped * clamped);
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    g[i] = outer * (target[i] / (ny * nt) - cosine * y[i] / (ny * ny));
  }
  return g;
}

double accumulate_gradients(const Model& model, const GraphInput& input,
                            std::span<const double> target, Model& grad, double scale) {
  Trace trace;
  const DepthVector y = forward(model, input, &trace);
  const double loss = angle_loss(y, target);
  std::vector<double> gy = angle_loss_gradient(y, target);
  for (double& g : gy) g *= scale;

  const std::size_t h = model.h;
  const std::size_t n = input.node_count();
  const std::size_t layer_count = model.layers.size();
  std::vector<Matrix> d_final(layer_count, Matrix(n, h));

  // Readout.
  {
    const auto& ro = model.readout;
    auto& gro = grad.readout;
    std::vector<double> dhid(h), du(h + model.d_feat);
    for (std::size_t v = 1; v <= input.num_vars(); ++v) {
      const double g = gy[v - 1];
      const auto hid = trace.readout_hidden.row(v - 1);
      const auto u = trace.readout_input.row(v - 1);
      axpy(g, hid, gro.w2.row(0));
      gro.b2[0] += g;
      for (std::size_t i = 0; i < h; ++i) dhid[i] = g * ro.w2(0, i) * (1.0 - hid[i] * hid[i]);
      ger_add(gro.w1, dhid, u);
      axpy(1.0, dhid, gro.b1);
      std::fill(du.begin(), du.end(), 0.0);
      gemv_t_add(ro.w1, dhid, du);
      axpy(1.0, std::span<const double>(du).first(h), d_final.back().row(v));
    }
  }

  std::vector<double> g(h), dc(h), dz(h), dr(h), drh(h), rh(h), tmp(h);
  for (std::size_t li = layer_count; li-- > 0;) {
    const Layer& layer = model.layers[li];
    Layer& glayer = grad.layers[li];
    const GruCell& cell = layer.gru;
    GruCell& gcell = glayer.gru;
    const LayerTrace& lt = trace.layers[li];
    const std::size_t din = cell.input_dim();

    Matrix d_state = d_final[li];
    for (std::size_t t = lt.steps.size(); t-- > 0;) {
      const StepTrace& st = lt.steps[t];
      Matrix d_prev(n, h);
      Matrix d_input(n, din);

      for (std::size_t v = 0; v < n; ++v) {
        const auto hv = st.state.row(v);
        const auto xv = st.input.row(v);
        const auto z = st.z.row(v), r = st.r.row(v), c = st.c.row(v);
        const auto dout = d_state.row(v);
        auto dh = d_prev.row(v);
        auto dx = d_input.row(v);

        for (std::size_t i = 0; i < h; ++i) {
          dc[i] = dout[i] * z[i] * (1.0 - c[i] * c[i]);
          dz[i] = dout[i] * (c[i] - hv[i]) * z[i] * (1.0 - z[i]);
          dh[i] += dout[i] * (1.0 - z[i]);
          rh[i] = r[i] * hv[i];
        }
        ger_add(gcell.wh, dc, xv);
        ger_add(gcell.uh, dc, rh);
        axpy(1.0, dc, gcell.bh);
        gemv_t_add(cell.wh, dc, dx);
        std::fill(drh.begin(), drh.end(), 0.0);
        gemv_t_add(cell.uh, dc, drh);
        for (std::size_t i = 0; i < h; ++i) {
          dr[i] = drh[i] * hv[i] * r[i] * (1.0 - r[i]);
          dh[i] += drh[i] * r[i];
        }
        ger_add(gcell.wz, dz, xv);
        ger_add(gcell.uz, dz, hv);
        axpy(1.0, dz, gcell.bz);
        gemv_t_add(cell.wz, dz, dx);
        gemv_t_add(cell.uz, dz, dh);
        ger_add(gcell.wr, dr, xv);
        ger_add(gcell.ur, dr, hv);
        axpy(1.0, dr, gcell.br);
        gemv_t_add(cell.wr, dr, dx);
        gemv_t_add(cell.ur, dr, dh);
      }

      // Messages: d_input[:, 0:h] flows into the message matrices and the
      // neighbours' states.
      std::vector<double> pair(2 * h), dpair(2 * h);
      for (std::uint32_t v = 0; v < n; ++v) {
        const auto& list = input.neighbors[v];
        if (list.empty()) continue;
        const double lambda = 1.0 / static_cast<double>(list.size());
        const auto dm = d_input.row(v).first(h);
        for_each_key_run(list, [&](std::size_t b, std::size_t e) {
          const auto slot = static_cast<std::size_t>(model.vocab.slot(list[b].key));
          sum_pairs(list, b, e, st.state, pair);
          ger_add(glayer.messages[slot], dm, pair, lambda);
          std::fill(dpair.begin(), dpair.end(), 0.0);
          gemv_t_add(layer.messages[slot], dm, dpair, lambda);
          for (std::size_t i = b; i < e; ++i) {
            axpy(1.0, std::span<const double>(dpair).first(h), d_prev.row(list[i].left.id));
            axpy(1.0, std::span<const double>(dpair).subspan(h), d_prev.row(list[i].right.id));
          }
        });
      }

      for (std::size_t s = 0; s < layer.residual_sources.size(); ++s) {
        const auto src = static_cast<std::size_t>(layer.residual_sources[s]);
        for (std::size_t v = 0; v < n; ++v) {
          axpy(1.0, d_input.row(v).subspan(h * (1 + s), h), d_final[src].row(v));
        }
      }
      d_state = std::move(d_prev);
    }
    if (li > 0) axpy(1.0, d_state.values(), d_final[li - 1].values());
  }
  return loss;
}

Order depth_to_order(std::span<const double> depths) {
  for (double d : depths) {
    if (!std::isfinite(d)) throw std::invalid_argument("depth_to_order: non-finite depth");
  }
  std::vector<std::uint32_t> idx(depths.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return depths[a] < depths[b]; });
  Order order;
  order.reserve(idx.size());
  for (auto i : idx) order.push_back(VarId{i + 1});
  return order;
}

DepthVector target_depths(std::span<const VarId> order) {
  validate_order(static_cast<std::uint32_t>(order.size()), order);
  DepthVector d(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) d[order[i].index - 1] = static_cast<double>(i + 1);
  return d;
}

}  // namespace hyperorder::nn
