#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "hyperorder/random.hpp"

namespace testsupport {

Cnf random_cnf(std::uint32_t n, std::uint32_t clauses, std::uint64_t seed, int max_len) {
  Rng rng(seed);
  Cnf cnf;
  cnf.num_vars = n;
  const auto cap = std::min<std::uint32_t>(static_cast<std::uint32_t>(max_len), n);
  for (std::uint32_t c = 0; c < clauses; ++c) {
    const auto len = static_cast<std::uint32_t>(rng.between(1, cap));
    std::vector<std::uint32_t> vars;
    while (vars.size() < len) {
      const auto v = static_cast<std::uint32_t>(rng.index(n)) + 1;
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    Clause clause;
    for (auto v : vars) clause.emplace_back(VarId{v}, rng.chance(0.5));
    cnf.clauses.push_back(clause);
  }
  return normalize(cnf);
}

Hypergraph3 random_hypergraph(std::uint32_t n, std::uint32_t edges, std::uint64_t seed) {
  Rng rng(seed);
  Cnf cnf;
  cnf.num_vars = n;
  for (std::uint32_t e = 0; e < edges; ++e) {
    const auto len = static_cast<std::uint32_t>(rng.between(1, std::min<std::uint32_t>(3, n)));
    std::vector<std::uint32_t> vars;
    while (vars.size() < len) {
      const auto v = static_cast<std::uint32_t>(rng.index(n)) + 1;
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    Clause clause;
    for (auto v : vars) clause.emplace_back(VarId{v}, rng.chance(0.5));
    cnf.clauses.push_back(clause);
  }
  return cnf_to_hypergraph(cnf);
}

Order random_order(std::uint32_t n, std::uint64_t seed) {
  Rng rng(seed);
  Order o = identity_order(n);
  rng.shuffle(std::span<VarId>(o));
  return o;
}

std::vector<bool> assignment_of(std::uint64_t mask, std::uint32_t n) {
  std::vector<bool> a(n);
  for (std::uint32_t i = 0; i < n; ++i) a[i] = ((mask >> i) & 1u) != 0;
  return a;
}

std::vector<bool> truth_table(const BddManager& mgr, NodeId root) {
  const std::uint32_t n = mgr.num_vars();
  std::vector<bool> t(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < t.size(); ++m) t[m] = mgr.eval(root, assignment_of(m, n));
  return t;
}

std::vector<bool> truth_table(const Cnf& cnf) {
  const std::uint32_t n = cnf.num_vars;
  std::vector<bool> t(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < t.size(); ++m) {
    bool all = true;
    for (const auto& c : cnf.clauses) {
      bool any = false;
      for (Literal l : c) {
        const bool v = ((m >> (l.var().index - 1)) & 1u) != 0;
        if (v == l.positive()) any = true;
      }
      if (!any) {
        all = false;
        break;
      }
    }
    t[m] = all;
  }
  return t;
}

std::size_t rebuilt_size(const Cnf& cnf, std::span<const VarId> order) {
  BddManager mgr(cnf.num_vars, Order(order.begin(), order.end()));
  return mgr.size(mgr.build_cnf(cnf));
}

std::vector<double> scalar_gru(const nn::GruCell& cell, const std::vector<double>& h,
                               const std::vector<double>& x) {
  const std::size_t n = h.size();
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  std::vector<double> z(n), r(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double az = cell.bz[i], ar = cell.br[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      az += cell.wz(i, j) * x[j];
      ar += cell.wr(i, j) * x[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      az += cell.uz(i, j) * h[j];
      ar += cell.ur(i, j) * h[j];
    }
    z[i] = sig(az);
    r[i] = sig(ar);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double ac = cell.bh[i];
    for (std::size_t j = 0; j < x.size(); ++j) ac += cell.wh(i, j) * x[j];
    for (std::size_t j = 0; j < n; ++j) ac += cell.uh(i, j) * (r[j] * h[j]);
    out[i] = (1.0 - z[i]) * h[i] + z[i] * std::tanh(ac);
  }
  return out;
}

void randomize(nn::Model& model, std::uint64_t seed, double scale) {
  Rng rng(seed);
  model.for_each_block([&](const std::string&, std::span<double> values) {
    for (double& v : values) v = rng.uniform(-scale, scale);
  });
}

std::vector<double> finite_difference_gradient(nn::Model& model,
                                               const std::function<double()>& f, double step) {
  std::vector<double> out;
  model.for_each_block([&](const std::string&, std::span<double> values) {
    for (double& v : values) {
      const double keep = v;
      v = keep + step;
      const double up = f();
      v = keep - step;
      const double down = f();
      v = keep;
      out.push_back((up - down) / (2.0 * step));
    }
  });
  return out;
}

std::vector<double> flatten(const nn::Model& model) {
  std::vector<double> out;
  model.for_each_block([&](const std::string&, std::span<const double> values) {
    out.insert(out.end(), values.begin(), values.end());
  });
  return out;
}

std::vector<GroupCheck> gradient_check(nn::Model& model, const nn::GraphInput& input,
                                       std::span<const double> target, double step,
                                       double floor) {
  nn::Model grad = model.zeros_like();
  nn::accumulate_gradients(model, input, target, grad);
  const std::vector<double> analytic = flatten(grad);
  const std::vector<double> numeric = finite_difference_gradient(
      model, [&] { return nn::angle_loss(nn::forward(model, input), target); }, step);

  std::vector<GroupCheck> out;
  std::vector<double> diff2, a2, n2;
  std::size_t at = 0;
  model.for_each_block([&](const std::string& name, std::span<const double> values) {
    const std::string group = nn::parameter_group(name);
    auto it = std::find_if(out.begin(), out.end(), [&](const GroupCheck& g) { return g.group == group; });
    if (it == out.end()) {
      out.push_back({group});
      diff2.push_back(0);
      a2.push_back(0);
      n2.push_back(0);
      it = out.end() - 1;
    }
    const auto gi = static_cast<std::size_t>(it - out.begin());
    for (std::size_t i = 0; i < values.size(); ++i, ++at) {
      const double a = analytic[at], n = numeric[at];
      ++it->parameters;
      diff2[gi] += (a - n) * (a - n);
      a2[gi] += a * a;
      n2[gi] += n * n;
      const double scale = std::max(std::abs(a), std::abs(n));
      if (scale <= floor || scale == 0.0) {
        ++it->skipped;
        continue;
      }
      it->max_relative = std::max(it->max_relative, std::abs(a - n) / scale);
    }
  });
  for (std::size_t gi = 0; gi < out.size(); ++gi) {
    const double scale = std::sqrt(std::max(a2[gi], n2[gi]));
    out[gi].norm_relative = scale == 0.0 ? 0.0 : std::sqrt(diff2[gi]) / scale;
  }
  return out;
}

}  // namespace testsupport
