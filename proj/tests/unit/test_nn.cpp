#include "dexgrasp/nn/layers.hpp"

#include "oracles/graph_check.hpp"

#include <doctest.h>

#include <filesystem>
#include <numeric>

using namespace dexgrasp;
using nn::Graph;
using nn::Matrix;
using nn::Var;
using testing::gradient_check;
using testing::random_matrix;

namespace {

Matrix permute_rows(const Matrix& m, const std::vector<int>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) out.row(i) = m.row(perm[i]);
  return out;
}

}  // namespace

TEST_CASE("elementwise and structural ops pass gradient checks") {
  std::mt19937_64 rng(1);
  const double tol = 1e-7;
  const Matrix a = random_matrix(4, 5, rng), b = random_matrix(4, 5, rng), c = random_matrix(5, 3, rng);
  const Matrix row = random_matrix(1, 5, rng);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.matmul(x[0], x[1]); }, {a, c}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.add(x[0], x[1]); }, {a, b}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.sub(x[0], x[1]); }, {a, b}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.mul(x[0], x[1]); }, {a, b}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.add_row(x[0], x[1]); }, {a, row}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.scale(x[0], -2.5); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.relu(x[0]); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.tanh(x[0]); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.mean(x[0]); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.transpose(x[0]); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.concat_cols({x[0], x[1], x[0]}); }, {a, b}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.concat_rows({x[0], x[1]}); }, {a, b}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.slice_rows(x[0], 1, 2); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.slice_cols(x[0], 2, 3); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.max_rows(x[0]); }, {a}) < tol);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.softmax_rows(x[0]); }, {a}) < tol);
  const Matrix wide = random_matrix(4, 6, rng);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.norm_cap(x[0], 3, 0.01); }, {wide}) < tol);
  const Matrix gain = random_matrix(1, 5, rng), bias = random_matrix(1, 5, rng);
  CHECK(gradient_check([](Graph& g, const auto& x) { return g.layer_norm_rows(x[0], x[1], x[2]); }, {a, gain, bias}) <
        tol);
}

TEST_CASE("norm cap keeps every group inside the cap") {
  Graph g;
  Matrix x(1, 6);
  x << 1e3, -2e3, 5e2, 1e-3, 0.0, 0.0;
  const Matrix& y = g.value(g.norm_cap(g.constant(x), 3, 0.01));
  CHECK(y.row(0).head(3).norm() < 0.01);
  CHECK(y.row(0).head(3).norm() > 0.00999);
  CHECK(y(0, 3) == doctest::Approx(1e-5).epsilon(1e-5));
}

TEST_CASE("max pooling routes gradient to the lowest tied row") {
  nn::ParamStore store;
  std::mt19937_64 rng(0);
  auto& p = store.create("x", 3, 2, nn::ParamStore::Init::Zero, rng);
  p.value << 1, 2, 5, 2, 5, 0;
  Graph g;
  const Var m = g.max_rows(g.param(p));
  CHECK(g.value(m)(0, 0) == 5.0);
  g.backward(g.sum(m));
  Matrix expect(3, 2);
  expect << 0, 1, 1, 0, 0, 0;
  CHECK(p.grad == expect);
}

TEST_CASE("mlp and point set encoder gradients") {
  std::mt19937_64 rng(2);
  nn::ParamStore store;
  const nn::PointSetEncoder enc(store, "enc", 4, {6, 8}, 5, rng);
  const Matrix pts = random_matrix(7, 4, rng);
  CHECK(gradient_check([&](Graph& g, const auto& x) { return enc.forward(g, x[0]); }, {pts}) < 1e-7);

  // gradient w.r.t. parameters: perturb through the store
  const nn::Mlp mlp(store, "mlp", {3, 8, 8, 2}, rng);
  const Matrix x = random_matrix(5, 3, rng);
  Graph g;
  const Var loss = g.sum(g.mul(mlp.forward(g, g.constant(x)), mlp.forward(g, g.constant(x))));
  store.zero_grad();
  g.backward(loss);
  auto& w = store.get("mlp.0.w");
  const Matrix analytic = w.grad;
  Matrix numeric(w.value.rows(), w.value.cols());
  for (Eigen::Index i = 0; i < w.value.size(); ++i) {
    const double keep = w.value.data()[i];
    auto eval = [&] {
      Graph h;
      const Var y = mlp.forward(h, h.constant(x));
      return h.value(h.sum(h.mul(y, y)))(0, 0);
    };
    w.value.data()[i] = keep + 1e-6;
    const double up = eval();
    w.value.data()[i] = keep - 1e-6;
    const double down = eval();
    w.value.data()[i] = keep;
    numeric.data()[i] = (up - down) / 2e-6;
  }
  CHECK((analytic - numeric).norm() / analytic.norm() < 1e-7);
}

TEST_CASE("point set encoder is permutation invariant") {
  std::mt19937_64 rng(3);
  nn::ParamStore store;
  const nn::PointSetEncoder enc(store, "enc", 7, {64, 128}, 128, rng);
  const Matrix pts = random_matrix(300, 7, rng);
  std::vector<int> perm(300);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Graph g;
  const Matrix a = g.value(enc.forward(g, g.constant(pts)));
  const Matrix b = g.value(enc.forward(g, g.constant(permute_rows(pts, perm))));
  CHECK(a == b);

  // singleton set equals the per-point embedding
  const Matrix one = pts.topRows(1);
  CHECK(g.value(enc.forward(g, g.constant(one))) == g.value(enc.per_point(g, g.constant(one))));
}

TEST_CASE("self attention") {
  std::mt19937_64 rng(4);
  nn::ParamStore store;
  const nn::AttentionConfig cfg{8, 2, 12};
  const nn::SelfAttentionLayer layer(store, "att", cfg, rng);
  const Matrix tokens = random_matrix(5, 8, rng);
  CHECK(gradient_check([&](Graph& g, const auto& x) { return layer.forward(g, x[0]); }, {tokens}) < 1e-7);

  // permutation equivariance
  const std::vector<int> perm{3, 0, 4, 1, 2};
  Graph g;
  const Matrix out = g.value(layer.forward(g, g.constant(tokens)));
  const Matrix out_p = g.value(layer.forward(g, g.constant(permute_rows(tokens, perm))));
  CHECK((permute_rows(out, perm) - out_p).cwiseAbs().maxCoeff() < 1e-12);

  // a single token only sees itself
  const Matrix t1 = tokens.topRows(1);
  const Matrix solo = g.value(layer.forward(g, g.constant(t1)));
  const Matrix again = g.value(layer.forward(g, g.constant(t1)));
  CHECK(solo == again);
  CHECK(solo.allFinite());
}

TEST_CASE("transformer encoder gradients with default widths") {
  std::mt19937_64 rng(5);
  nn::ParamStore store;
  const nn::TransformerEncoder enc(store, "tf", 2, nn::AttentionConfig{16, 4, 32}, rng);
  const Matrix tokens = random_matrix(4, 16, rng);
  CHECK(gradient_check([&](Graph& g, const auto& x) { return enc.forward(g, x[0]); }, {tokens}) < 1e-7);
}

TEST_CASE("adam step") {
  nn::ParamStore store;
  std::mt19937_64 rng(0);
  auto& p = store.create("p", 1, 2, nn::ParamStore::Init::Zero, rng);
  p.grad << 0.5, -2.0;
  store.adam_step();
  // first bias-corrected step moves each entry by lr against the gradient sign
  CHECK(p.value(0, 0) == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(p.value(0, 1) == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(p.m(0, 1) == doctest::Approx(-0.2));
  CHECK(p.v(0, 1) == doctest::Approx(0.004));
}

TEST_CASE("duplicate parameter names are rejected") {
  nn::ParamStore store;
  std::mt19937_64 rng(0);
  store.create("a", 1, 1, nn::ParamStore::Init::Zero, rng);
  CHECK_THROWS(store.create("a", 1, 1, nn::ParamStore::Init::Zero, rng));
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(6);
  nn::ParamStore a;
  const nn::Mlp mlp_a(a, "m", {3, 4, 2}, rng);
  const auto path = std::filesystem::temp_directory_path() / "dexgrasp_ckpt.bin";
  a.save(path, {{"kind", "test"}});
  CHECK(nn::ParamStore::read_meta(path)["kind"] == "test");

  nn::ParamStore b;
  std::mt19937_64 other(99);
  const nn::Mlp mlp_b(b, "m", {3, 4, 2}, other);
  b.load(path);
  for (std::size_t i = 0; i < a.params().size(); ++i) CHECK(a.params()[i]->value == b.params()[i]->value);

  nn::ParamStore c;
  const nn::Mlp mlp_c(c, "m", {3, 5, 2}, other);
  CHECK_THROWS(c.load(path));
  std::filesystem::remove(path);
}
