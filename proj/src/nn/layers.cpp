#include "dexgrasp/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace dexgrasp::nn {

Linear::Linear(ParamStore& store, const std::string& name, int in, int out, std::mt19937_64& rng, bool zero)
    : w_(&store.create(name + ".w", in, out, zero ? ParamStore::Init::Zero : ParamStore::Init::He, rng)),
      b_(&store.create(name + ".b", 1, out, ParamStore::Init::Zero, rng)),
      in_(in),
      out_(out) {}

Var Linear::forward(Graph& g, Var x) const {
  if (g.cols(x) != in_) throw std::invalid_argument("linear: expected " + std::to_string(in_) + " input columns");
  return g.add_row(g.matmul(x, g.param(*w_)), g.param(*b_));
}

Matrix Linear::infer(const Matrix& x) const {
  if (x.cols() != in_) throw std::invalid_argument("linear: expected " + std::to_string(in_) + " input columns");
  Matrix y = x * w_->value;
  y.rowwise() += b_->value.row(0);
  return y;
}

Mlp::Mlp(ParamStore& store, const std::string& name, const std::vector<int>& widths, std::mt19937_64& rng,
         bool zero_last) {
  if (widths.size() < 2) throw std::invalid_argument("mlp needs at least input and output widths");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    layers_.emplace_back(store, name + "." + std::to_string(i), widths[i], widths[i + 1], rng, last && zero_last);
  }
}

Var Mlp::forward(Graph& g, Var x) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(g, x);
    if (i + 1 < layers_.size()) x = g.relu(x);
  }
  return x;
}

Matrix Mlp::infer(const Matrix& x) const {
  Matrix y = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    y = layers_[i].infer(y);
    if (i + 1 < layers_.size()) y = y.cwiseMax(0.0);
  }
  return y;
}

PointSetEncoder::PointSetEncoder(ParamStore& store, const std::string& name, int features,
                                 const std::vector<int>& hidden, int out, std::mt19937_64& rng) {
  std::vector<int> widths{features};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  mlp_ = Mlp(store, name, widths, rng);
}

Var PointSetEncoder::per_point(Graph& g, Var points) const { return mlp_.forward(g, points); }

Var PointSetEncoder::forward(Graph& g, Var points) const { return g.max_rows(per_point(g, points)); }

SelfAttentionLayer::SelfAttentionLayer(ParamStore& store, const std::string& name, const AttentionConfig& cfg,
                                       std::mt19937_64& rng)
    : cfg_(cfg) {
  if (cfg.width % cfg.heads != 0) throw std::invalid_argument("attention width must divide by head count");
  q_ = Linear(store, name + ".q", cfg.width, cfg.width, rng);
  k_ = Linear(store, name + ".k", cfg.width, cfg.width, rng);
  v_ = Linear(store, name + ".v", cfg.width, cfg.width, rng);
  o_ = Linear(store, name + ".o", cfg.width, cfg.width, rng);
  ff1_ = Linear(store, name + ".ff1", cfg.width, cfg.ff_width, rng);
  ff2_ = Linear(store, name + ".ff2", cfg.ff_width, cfg.width, rng);
  ln1_gain_ = &store.create(name + ".ln1.gain", 1, cfg.width, ParamStore::Init::Ones, rng);
  ln1_bias_ = &store.create(name + ".ln1.bias", 1, cfg.width, ParamStore::Init::Zero, rng);
  ln2_gain_ = &store.create(name + ".ln2.gain", 1, cfg.width, ParamStore::Init::Ones, rng);
  ln2_bias_ = &store.create(name + ".ln2.bias", 1, cfg.width, ParamStore::Init::Zero, rng);
}

Var SelfAttentionLayer::attention(Graph& g, Var x) const {
  const Var q = q_.forward(g, x);
  const Var k = k_.forward(g, x);
  const Var v = v_.forward(g, x);
  const int dh = cfg_.width / cfg_.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> heads;
  for (int h = 0; h < cfg_.heads; ++h) {
    const Var qh = g.slice_cols(q, h * dh, dh);
    const Var kh = g.slice_cols(k, h * dh, dh);
    const Var vh = g.slice_cols(v, h * dh, dh);
    const Var weights = g.softmax_rows(g.scale(g.matmul(qh, g.transpose(kh)), inv_sqrt));
    heads.push_back(g.matmul(weights, vh));
  }
  return o_.forward(g, g.concat_cols(heads));
}

Var SelfAttentionLayer::forward(Graph& g, Var tokens) const {
  const Var h = g.layer_norm_rows(g.add(tokens, attention(g, tokens)), g.param(*ln1_gain_), g.param(*ln1_bias_));
  const Var ff = ff2_.forward(g, g.relu(ff1_.forward(g, h)));
  return g.layer_norm_rows(g.add(h, ff), g.param(*ln2_gain_), g.param(*ln2_bias_));
}

TransformerEncoder::TransformerEncoder(ParamStore& store, const std::string& name, int layers,
                                       const AttentionConfig& cfg, std::mt19937_64& rng) {
  for (int i = 0; i < layers; ++i) layers_.emplace_back(store, name + "." + std::to_string(i), cfg, rng);
}

Var TransformerEncoder::forward(Graph& g, Var tokens) const {
  for (const auto& layer : layers_) tokens = layer.forward(g, tokens);
  return tokens;
}

}  // namespace dexgrasp::nn
