#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace dexgrasp::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Trainable tensor with its gradient and Adam moment buffers.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Named parameters plus optimizer state. Parameter addresses are stable.
class ParamStore {
 public:
  enum class Init { Zero, He, Xavier, Ones };

  Parameter& create(const std::string& name, int rows, int cols, Init init, std::mt19937_64& rng);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  const std::vector<std::unique_ptr<Parameter>>& params() const { return params_; }
  std::size_t scalar_count() const;

  void zero_grad();
  /// One Adam update over every parameter.
  void adam_step(const AdamConfig& cfg = {});
  long step_count() const { return steps_; }

  /// Flat binary container: magic, u64 header size, JSON header, raw f64 values.
  void save(const std::filesystem::path& path, const nlohmann::json& meta = {}) const;
  /// Reads values for every parameter in this store; returns the stored meta block.
  nlohmann::json load(const std::filesystem::path& path);
  static nlohmann::json read_meta(const std::filesystem::path& path);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, std::size_t> index_;
  long steps_ = 0;
};

class Graph;

/// Handle to a node of a Graph.
struct Var {
  int id = -1;
};

/// Reverse-mode tape. Nodes are appended in evaluation order and
/// back-propagated in reverse.
class Graph {
 public:
  Var constant(const Matrix& value);
  Var param(Parameter& p);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  /// Gradient of the last `backward` root w.r.t. `v` (zero-size if unreached).
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  Eigen::Index rows(Var v) const { return value(v).rows(); }
  Eigen::Index cols(Var v) const { return value(v).cols(); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  /// a (n x m) plus a broadcast row (1 x m).
  Var add_row(Var a, Var row);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var relu(Var a);
  Var tanh(Var a);
  Var sum(Var a);
  Var mean(Var a);
  Var transpose(Var a);
  Var concat_cols(const std::vector<Var>& parts);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count);
  Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count);
  /// Column-wise maximum over rows (1 x m). Ties go to the lowest row.
  Var max_rows(Var a);
  Var softmax_rows(Var a);
  /// Per-row normalisation followed by gain and bias rows.
  Var layer_norm_rows(Var a, Var gain, Var bias, double eps = 1e-5);
  /// Smooth norm cap on consecutive column groups: cap * x / sqrt(1 + |x|^2).
  Var norm_cap(Var a, int group, double cap);

  /// Seeds d(root)/d(root) = 1 (root must be 1 x 1) and propagates.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    std::function<void()> back;
  };

  Var push(Matrix value, bool needs_grad, std::function<void()> back = {});
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  Matrix& acc(Var v);

  std::vector<Node> nodes_;
};

}  // namespace dexgrasp::nn
