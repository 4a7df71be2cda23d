#include "dexgrasp/nn/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dexgrasp::nn {

namespace {

constexpr char kMagic[8] = {'D', 'X', 'G', 'C', 'K', 'P', 'T', '\0'};
constexpr int kCheckpointVersion = 1;

}  // namespace

// ---------------------------------------------------------------------------
// ParamStore

Parameter& ParamStore::create(const std::string& name, int rows, int cols, Init init, std::mt19937_64& rng) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix::Zero(rows, cols);
  switch (init) {
    case Init::Zero:
      break;
    case Init::Ones:
      p->value.setOnes();
      break;
    case Init::He:
    case Init::Xavier: {
      const double std = init == Init::He ? std::sqrt(2.0 / rows) : std::sqrt(2.0 / (rows + cols));
      std::normal_distribution<double> normal(0.0, std);
      for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = normal(rng);
      break;
    }
  }
  p->grad = Matrix::Zero(rows, cols);
  p->m = Matrix::Zero(rows, cols);
  p->v = Matrix::Zero(rows, cols);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParamStore::get(const std::string& name) {
  const auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return *params_[it->second];
}

const Parameter& ParamStore::get(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return *params_[it->second];
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

void ParamStore::adam_step(const AdamConfig& cfg) {
  ++steps_;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(steps_));
  for (auto& p : params_) {
    p->m = cfg.beta1 * p->m + (1.0 - cfg.beta1) * p->grad;
    p->v = cfg.beta2 * p->v + (1.0 - cfg.beta2) * p->grad.cwiseProduct(p->grad);
    p->value.array() -= cfg.lr * (p->m.array() / c1) / ((p->v.array() / c2).sqrt() + cfg.eps);
  }
}

void ParamStore::save(const std::filesystem::path& path, const nlohmann::json& meta) const {
  nlohmann::json header;
  header["version"] = kCheckpointVersion;
  header["meta"] = meta;
  header["steps"] = steps_;
  nlohmann::json tensors = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& p : params_) {
    tensors[p->name] = {{"shape", {p->value.rows(), p->value.cols()}}, {"dtype", "f64"}, {"offset", offset}};
    offset += static_cast<std::uint64_t>(p->value.size()) * sizeof(double);
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : params_)
    out.write(reinterpret_cast<const char*>(p->value.data()), static_cast<std::streamsize>(p->value.size() * sizeof(double)));
}

namespace {

nlohmann::json read_header(std::ifstream& in, const std::filesystem::path& path) {
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("not a checkpoint: " + path.string());
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("truncated checkpoint header: " + path.string());
  auto header = nlohmann::json::parse(text);
  if (!header.contains("version")) throw std::runtime_error("checkpoint header lacks a version");
  if (header["version"].get<int>() != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + header["version"].dump());
  return header;
}

}  // namespace

nlohmann::json ParamStore::read_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return read_header(in, path).value("meta", nlohmann::json::object());
}

nlohmann::json ParamStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const auto header = read_header(in, path);
  const std::streamoff data_start = in.tellg();
  const auto& tensors = header.at("tensors");
  for (auto& p : params_) {
    if (!tensors.contains(p->name)) throw std::runtime_error("checkpoint lacks parameter '" + p->name + "'");
    const auto& t = tensors[p->name];
    if (t.at("dtype") != "f64") throw std::runtime_error("unsupported dtype for '" + p->name + "'");
    const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2 || shape[0] != p->value.rows() || shape[1] != p->value.cols())
      throw std::runtime_error("shape mismatch for parameter '" + p->name + "'");
    in.seekg(data_start + static_cast<std::streamoff>(t.at("offset").get<std::uint64_t>()));
    in.read(reinterpret_cast<char*>(p->value.data()), static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint data for '" + p->name + "'");
  }
  steps_ = header.value("steps", 0L);
  return header.value("meta", nlohmann::json::object());
}

// ---------------------------------------------------------------------------
// Graph

Var Graph::push(Matrix value, bool needs_grad, std::function<void()> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Matrix& Graph::acc(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Graph::constant(const Matrix& value) { return push(value, false); }

Var Graph::param(Parameter& p) {
  const int o = static_cast<int>(nodes_.size());
  return push(p.value, true, [this, o, &p] { p.grad += nodes_[o].grad; });
}

Var Graph::matmul(Var a, Var b) {
  if (cols(a) != rows(b)) throw std::invalid_argument("matmul: shape mismatch");
  const int o = static_cast<int>(nodes_.size());
  return push(value(a) * value(b), needs(a) || needs(b), [this, o, a, b] {
    const Matrix& g = nodes_[o].grad;
    if (needs(a)) acc(a).noalias() += g * value(b).transpose();
    if (needs(b)) acc(b).noalias() += value(a).transpose() * g;
  });
}

Var Graph::add(Var a, Var b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw std::invalid_argument("add: shape mismatch");
  const int o = static_cast<int>(nodes_.size());
  return push(value(a) + value(b), needs(a) || needs(b), [this, o, a, b] {
    if (needs(a)) acc(a) += nodes_[o].grad;
    if (needs(b)) acc(b) += nodes_[o].grad;
  });
}

Var Graph::add_row(Var a, Var row) {
  if (rows(row) != 1 || cols(row) != cols(a)) throw std::invalid_argument("add_row: shape mismatch");
  const int o = static_cast<int>(nodes_.size());
  Matrix out = value(a);
  out.rowwise() += value(row).row(0);
  return push(std::move(out), needs(a) || needs(row), [this, o, a, row] {
    const Matrix& g = nodes_[o].grad;
    if (needs(a)) acc(a) += g;
    if (needs(row)) acc(row) += g.colwise().sum();
  });
}

Var Graph::sub(Var a, Var b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw std::invalid_argument("sub: shape mismatch");
  const int o = static_cast<int>(nodes_.size());
  return push(value(a) - value(b), needs(a) || needs(b), [this, o, a, b] {
    if (needs(a)) acc(a) += nodes_[o].grad;
    if (needs(b)) acc(b) -= nodes_[o].grad;
  });
}

Var Graph::mul(Var a, Var b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw std::invalid_argument("mul: shape mismatch");
  const int o = static_cast<int>(nodes_.size());
  return push(value(a).cwiseProduct(value(b)), needs(a) || needs(b), [this, o, a, b] {
    const Matrix& g = nodes_[o].grad;
    if (needs(a)) acc(a) += g.cwiseProduct(value(b));
    if (needs(b)) acc(b) += g.cwiseProduct(value(a));
  });
}

Var Graph::scale(Var a, double s) {
  const int o = static_cast<int>(nodes_.size());
  return push(value(a) * s, needs(a), [this, o, a, s] { acc(a) += nodes_[o].grad * s; });
}

Var Graph::relu(Var a) {
  const int o = static_cast<int>(nodes_.size());
  return push(value(a).cwiseMax(0.0), needs(a), [this, o, a] {
    acc(a) += (value(a).array() > 0.0).select(nodes_[o].grad, 0.0);
  });
}

Var Graph::tanh(Var a) {
  const int o = static_cast<int>(nodes_.size());
  return push(value(a).array().tanh().matrix(), needs(a), [this, o, a] {
    const Matrix& y = nodes_[o].value;
    acc(a).array() += nodes_[o].grad.array() * (1.0 - y.array().square());
  });
}

Var Graph::norm_cap(Var a, int group, double cap) {
  const Matrix& x = value(a);
  if (group <= 0 || x.cols() % group != 0) throw std::invalid_argument("norm_cap: group does not divide width");
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); c += group) {
      const double s = 1.0 / std::sqrt(1.0 + x.row(r).segment(c, group).squaredNorm());
      y.row(r).segment(c, group) = cap * s * x.row(r).segment(c, group);
    }
  const int o = static_cast<int>(nodes_.size());
  return push(std::move(y), needs(a), [this, o, a, group, cap] {
    const Matrix& x = value(a);
    const Matrix& g = nodes_[o].grad;
    Matrix& ga = acc(a);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index c = 0; c < x.cols(); c += group) {
        const auto xs = x.row(r).segment(c, group);
        const auto gs = g.row(r).segment(c, group);
        const double s = 1.0 / std::sqrt(1.0 + xs.squaredNorm());
        ga.row(r).segment(c, group) += cap * (s * gs - s * s * s * xs.dot(gs) * xs);
      }
  });
}

Var Graph::sum(Var a) {
  const int o = static_cast<int>(nodes_.size());
  return push(Matrix::Constant(1, 1, value(a).sum()), needs(a), [this, o, a] {
    acc(a).array() += nodes_[o].grad(0, 0);
  });
}

Var Graph::mean(Var a) {
  const double n = static_cast<double>(value(a).size());
  return scale(sum(a), 1.0 / n);
}

Var Graph::transpose(Var a) {
  const int o = static_cast<int>(nodes_.size());
  return push(value(a).transpose(), needs(a), [this, o, a] { acc(a) += nodes_[o].grad.transpose(); });
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  Eigen::Index total = 0;
  bool any = false;
  for (Var p : parts) {
    if (rows(p) != rows(parts[0])) throw std::invalid_argument("concat_cols: row mismatch");
    total += cols(p);
    any = any || needs(p);
  }
  Matrix out(rows(parts[0]), total);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleCols(at, cols(p)) = value(p);
    at += cols(p);
  }
  const int o = static_cast<int>(nodes_.size());
  return push(std::move(out), any, [this, o, parts] {
    Eigen::Index off = 0;
    for (Var p : parts) {
      if (needs(p)) acc(p) += nodes_[o].grad.middleCols(off, cols(p));
      off += cols(p);
    }
  });
}

Var Graph::concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  Eigen::Index total = 0;
  bool any = false;
  for (Var p : parts) {
    if (cols(p) != cols(parts[0])) throw std::invalid_argument("concat_rows: column mismatch");
    total += rows(p);
    any = any || needs(p);
  }
  Matrix out(total, cols(parts[0]));
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleRows(at, rows(p)) = value(p);
    at += rows(p);
  }
  const int o = static_cast<int>(nodes_.size());
  return push(std::move(out), any, [this, o, parts] {
    Eigen::Index off = 0;
    for (Var p : parts) {
      if (needs(p)) acc(p) += nodes_[o].grad.middleRows(off, rows(p));
      off += rows(p);
    }
  });
}

Var Graph::slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > rows(a)) throw std::invalid_argument("slice_rows: out of range");
  const int o = static_cast<int>(nodes_.size());
  return push(value(a).middleRows(begin, count), needs(a), [this, o, a, begin, count] {
    acc(a).middleRows(begin, count) += nodes_[o].grad;
  });
}

Var Graph::slice_cols(Var a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > cols(a)) throw std::invalid_argument("slice_cols: out of range");
  const int o = static_cast<int>(nodes_.size());
  return push(value(a).middleCols(begin, count), needs(a), [this, o, a, begin, count] {
    acc(a).middleCols(begin, count) += nodes_[o].grad;
  });
}

Var Graph::max_rows(Var a) {
  const Matrix& x = value(a);
  if (x.rows() == 0) throw std::invalid_argument("max_rows: empty input");
  std::vector<Eigen::Index> arg(x.cols(), 0);
  Matrix out(1, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 1; r < x.rows(); ++r)
      if (x(r, c) > x(arg[c], c)) arg[c] = r;
    out(0, c) = x(arg[c], c);
  }
  const int o = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, o, a, arg] {
    Matrix& g = acc(a);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(arg.size()); ++c) g(arg[c], c) += nodes_[o].grad(0, c);
  });
}

Var Graph::softmax_rows(Var a) {
  Matrix y = value(a);
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    y.row(r).array() -= y.row(r).maxCoeff();
    y.row(r) = y.row(r).array().exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  const int o = static_cast<int>(nodes_.size());
  return push(std::move(y), needs(a), [this, o, a] {
    const Matrix& y = nodes_[o].value;
    const Matrix& g = nodes_[o].grad;
    const Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    Matrix d = g;
    d.colwise() -= dot;
    acc(a) += d.cwiseProduct(y);
  });
}

Var Graph::layer_norm_rows(Var a, Var gain, Var bias, double eps) {
  const Matrix& x = value(a);
  const Eigen::Index d = x.cols();
  if (rows(gain) != 1 || cols(gain) != d || rows(bias) != 1 || cols(bias) != d)
    throw std::invalid_argument("layer_norm_rows: shape mismatch");
  Matrix xhat(x.rows(), d);
  Eigen::VectorXd inv_std(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (x.row(r).array() - mu) * inv_std[r];
  }
  Matrix y = xhat.array().rowwise() * value(gain).row(0).array();
  y.rowwise() += value(bias).row(0);
  const int o = static_cast<int>(nodes_.size());
  return push(std::move(y), needs(a) || needs(gain) || needs(bias), [this, o, a, gain, bias, xhat, inv_std] {
    const Matrix& g = nodes_[o].grad;
    if (needs(gain)) acc(gain) += g.cwiseProduct(xhat).colwise().sum();
    if (needs(bias)) acc(bias) += g.colwise().sum();
    if (needs(a)) {
      const Matrix dxhat = g.array().rowwise() * value(gain).row(0).array();
      const Eigen::VectorXd m1 = dxhat.rowwise().mean();
      const Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().mean();
      Matrix dx = dxhat;
      dx.colwise() -= m1;
      dx -= (xhat.array().colwise() * m2.array()).matrix();
      dx = dx.array().colwise() * inv_std.array();
      acc(a) += dx;
    }
  });
}

void Graph::backward(Var root) {
  if (rows(root) != 1 || cols(root) != 1) throw std::invalid_argument("backward: root must be scalar");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  acc(root).setConstant(1.0);
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.needs_grad && n.back && n.grad.size() > 0) n.back();
  }
}

}  // namespace dexgrasp::nn
