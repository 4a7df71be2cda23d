#pragma once

#include "dexgrasp/nn/tensor.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

namespace dexgrasp::testing {

using GraphFn = std::function<nn::Var(nn::Graph&, const std::vector<nn::Var>&)>;

inline nn::Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

/// Worst relative error between reverse-mode gradients of sum(f(x) * w) and
/// central differences, over every input entry. `w` is a fixed random weight.
inline double gradient_check(const GraphFn& f, const std::vector<nn::Matrix>& inputs, std::uint64_t seed = 1,
                             double h = 1e-6) {
  std::mt19937_64 rng(seed);
  nn::ParamStore store;
  std::vector<nn::Parameter*> params;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& p = store.create("x" + std::to_string(i), static_cast<int>(inputs[i].rows()),
                           static_cast<int>(inputs[i].cols()), nn::ParamStore::Init::Zero, rng);
    p.value = inputs[i];
    params.push_back(&p);
  }
  nn::Matrix weight;
  auto evaluate = [&](bool grad) {
    nn::Graph g;
    std::vector<nn::Var> vars;
    for (auto* p : params) vars.push_back(g.param(*p));
    const nn::Var out = f(g, vars);
    if (weight.size() == 0) weight = random_matrix(static_cast<int>(g.rows(out)), static_cast<int>(g.cols(out)), rng);
    const nn::Var loss = g.sum(g.mul(out, g.constant(weight)));
    if (grad) {
      store.zero_grad();
      g.backward(loss);
    }
    return g.value(loss)(0, 0);
  };
  evaluate(true);
  double worst = 0.0;
  for (auto* p : params) {
    const nn::Matrix analytic = p->grad;
    nn::Matrix numeric(analytic.rows(), analytic.cols());
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double keep = p->value.data()[i];
      p->value.data()[i] = keep + h;
      const double up = evaluate(false);
      p->value.data()[i] = keep - h;
      const double down = evaluate(false);
      p->value.data()[i] = keep;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
    worst = std::max(worst, (analytic - numeric).norm() / scale);
  }
  return worst;
}

}  // namespace dexgrasp::testing
