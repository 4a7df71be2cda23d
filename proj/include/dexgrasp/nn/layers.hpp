#pragma once

#include "dexgrasp/nn/tensor.hpp"

#include <string>
#include <vector>

namespace dexgrasp::nn {

/// Affine map x W + b on row vectors.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, int in, int out, std::mt19937_64& rng, bool zero = false);
  Var forward(Graph& g, Var x) const;
  /// Same map without recording a graph.
  Matrix infer(const Matrix& x) const;
  int in() const { return in_; }
  int out() const { return out_; }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

/// Affine layers with ReLU between them; the last layer is linear.
class Mlp {
 public:
  Mlp() = default;
  /// `widths` lists every layer size including input and output.
  Mlp(ParamStore& store, const std::string& name, const std::vector<int>& widths, std::mt19937_64& rng,
      bool zero_last = false);
  Var forward(Graph& g, Var x) const;
  Matrix infer(const Matrix& x) const;
  int in() const { return layers_.front().in(); }
  int out() const { return layers_.back().out(); }

 private:
  std::vector<Linear> layers_;
};

/// Shared per-point MLP followed by channel-wise max pooling.
class PointSetEncoder {
 public:
  PointSetEncoder() = default;
  PointSetEncoder(ParamStore& store, const std::string& name, int features, const std::vector<int>& hidden, int out,
                  std::mt19937_64& rng);
  /// Per-point embeddings, n x out.
  Var per_point(Graph& g, Var points) const;
  /// Pooled embedding, 1 x out.
  Var forward(Graph& g, Var points) const;
  int out() const { return mlp_.out(); }

 private:
  Mlp mlp_;
};

struct AttentionConfig {
  int width = 128;
  int heads = 4;
  int ff_width = 256;
};

/// Post-norm transformer encoder layer: multi-head self-attention and a
/// feed-forward block, each wrapped in a residual and layer normalisation.
class SelfAttentionLayer {
 public:
  SelfAttentionLayer() = default;
  SelfAttentionLayer(ParamStore& store, const std::string& name, const AttentionConfig& cfg, std::mt19937_64& rng);
  Var forward(Graph& g, Var tokens) const;

 private:
  Var attention(Graph& g, Var x) const;

  AttentionConfig cfg_;
  Linear q_, k_, v_, o_;
  Linear ff1_, ff2_;
  Parameter* ln1_gain_ = nullptr;
  Parameter* ln1_bias_ = nullptr;
  Parameter* ln2_gain_ = nullptr;
  Parameter* ln2_bias_ = nullptr;
};

class TransformerEncoder {
 public:
  TransformerEncoder() = default;
  TransformerEncoder(ParamStore& store, const std::string& name, int layers, const AttentionConfig& cfg,
                     std::mt19937_64& rng);
  Var forward(Graph& g, Var tokens) const;

 private:
  std::vector<SelfAttentionLayer> layers_;
};

}  // namespace dexgrasp::nn
