#include "dexgrasp/adapt/net.hpp"
#include "dexgrasp/adapt/solvers.hpp"

#include "oracles/finite_difference.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace dexgrasp;
using geom::Vec3;

namespace {

Eigen::VectorXd random_q(const model::GripperModel& m, std::mt19937_64& rng, double margin = 0.0) {
  Eigen::VectorXd q(m.dof());
  for (int i = 0; i < m.dof(); ++i)
    q[i] = std::uniform_real_distribution<double>(m.lower()[i] + margin, m.upper()[i] - margin)(rng);
  return q;
}

// Displacement of both keypoints of the one-joint chain for a rotation by angle a from q = 0.
Eigen::VectorXd arc_chord(double a) {
  Eigen::VectorXd dp(6);
  const Vec3 chord(std::cos(a) - 1.0, std::sin(a), 0.0);
  dp << chord, chord;
  return dp;
}

}  // namespace

TEST_CASE("cycle loss vanishes without motion") {
  const auto hand = testing::load_hand("spatial3");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6 * hand.finger_count());
  const auto l = adapt::cycle_point_loss(hand, hand.rest(), Eigen::VectorXd::Zero(hand.dof()), zero);
  CHECK(l.value == 0.0);
  CHECK(l.grad.norm() == 0.0);
}

TEST_CASE("cycle loss on a one-joint finger matches the arc chord") {
  const auto chain = testing::planar_chain(1);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const auto l = adapt::cycle_point_loss(chain, q, Eigen::VectorXd::Constant(1, 0.1), arc_chord(0.1));
  CHECK(l.value <= 1e-12);
}

TEST_CASE("cycle and self-collision gradients match finite differences") {
  std::mt19937_64 rng(12);
  for (const char* name : {"planar2", "spatial3", "allegro4"}) {
    const auto hand = testing::load_hand(name);
    const auto ctx = adapt::CollisionContext::build(hand, 64, 1);
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd q = random_q(hand, rng, 0.06);
      std::normal_distribution<double> n(0.0, 0.02);
      Eigen::VectorXd dj(hand.dof()), dp(6 * hand.finger_count());
      for (auto& x : dj) x = n(rng);
      for (auto& x : dp) x = 0.2 * n(rng);
      const auto l = adapt::cycle_point_loss(hand, q, dj, dp);
      const auto fd = testing::fd_gradient(
          [&](const Eigen::VectorXd& x) { return adapt::cycle_point_loss(hand, q, x, dp).value; }, dj);
      CHECK(testing::relative_error(l.grad, fd) <= 1e-6);

      const auto s = adapt::self_collision_loss(hand, ctx, q);
      const auto fds = testing::fd_gradient(
          [&](const Eigen::VectorXd& x) { return adapt::self_collision_loss(hand, ctx, x).value; }, q);
      CHECK(testing::relative_error(s.grad, fds) <= 1e-6);
    }
  }
}

TEST_CASE("overlapping boxes match the analytic penetration sum") {
  const auto boxes = testing::overlapping_boxes();
  const auto ctx = adapt::CollisionContext::build(boxes, 64, 3);
  const int a = boxes.link_index("a"), b = boxes.link_index("b");
  double expect = 0.0;
  for (const Vec3& s : ctx.samples[a]) expect += testing::cube_depth(s, Vec3(0.8, 0, 0));
  for (const Vec3& s : ctx.samples[b]) expect += testing::cube_depth(s + Vec3(0.8, 0, 0), Vec3::Zero());
  const auto l = adapt::self_collision_loss(boxes, ctx, Eigen::Vector2d(0.0, 0.0));
  CHECK(expect > 0.0);
  CHECK(std::abs(l.value - expect) <= 1e-6);

  CHECK(adapt::self_collision_loss(boxes, ctx, Eigen::Vector2d(0.0, 0.3)).value == 0.0);

  // random configurations: gradient against finite differences
  std::mt19937_64 rng(5);
  int colliding = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd q = random_q(boxes, rng);
    const auto s = adapt::self_collision_loss(boxes, ctx, q);
    colliding += s.value > 0.0;
    const auto fd = testing::fd_gradient(
        [&](const Eigen::VectorXd& x) { return adapt::self_collision_loss(boxes, ctx, x).value; }, q);
    CHECK(testing::relative_error(s.grad, fd) <= 1e-6);
  }
  CHECK(colliding > 10);
}

TEST_CASE("adjacent links are excluded") {
  const auto hand = testing::load_hand("planar2");
  const auto ctx = adapt::CollisionContext::build(hand, 64, 0);
  const int palm = hand.link_index("palm"), prox = hand.link_index("f0_prox"), dist = hand.link_index("f0_dist");
  CHECK(ctx.excluded(palm, prox));
  CHECK(ctx.excluded(prox, dist));
  CHECK_FALSE(ctx.excluded(palm, dist));
  CHECK(adapt::self_collision_loss(hand, ctx, hand.rest()).value == 0.0);
  for (const char* name : {"spatial3", "allegro4", "shadow5"}) {
    const auto h = testing::load_hand(name);
    CHECK(adapt::self_collision_loss(h, adapt::CollisionContext::build(h, 64, 0), h.rest()).value == 0.0);
  }
}

TEST_CASE("total loss is the sum of its terms") {
  std::mt19937_64 rng(2);
  const auto boxes = testing::overlapping_boxes();
  const auto ctx = adapt::CollisionContext::build(boxes, 64, 3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd q = random_q(boxes, rng, 0.1);
    const Eigen::Vector2d dj(0.01, -0.02);
    Eigen::VectorXd dp = Eigen::VectorXd::Constant(12, 0.003);
    const auto p = adapt::cycle_point_loss(boxes, q, dj, dp);
    const auto s = adapt::self_collision_loss(boxes, ctx, q + dj);
    const auto total = adapt::total_adaptation_loss(boxes, ctx, q, dj, dp);
    CHECK(total.value == p.value + 1.0 * s.value);
    CHECK((total.grad - (p.grad + s.grad)).norm() == 0.0);
  }
}

TEST_CASE("ob-ik recovers the arc angle") {
  const auto chain = testing::planar_chain(1);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const auto r = adapt::ob_ik_solve(chain, q, arc_chord(0.1));
  CHECK(std::abs(r.dj[0] - 0.1) <= 1e-4);

  const auto zero = adapt::ob_ik_solve(chain, q, Eigen::VectorXd::Zero(6));
  CHECK(zero.dj[0] == 0.0);
  CHECK(zero.loss == 0.0);
}

TEST_CASE("ob-ik on an unreachable target finds the least-squares optimum") {
  const auto chain = testing::planar_chain(1);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, 0.2);
  Eigen::VectorXd dp(6);
  dp << 0.5, 3.0, 0.0, 0.5, 3.0, 0.0;
  adapt::SolverOptions opt;
  opt.iterations = 2000;
  const auto r = adapt::ob_ik_solve(chain, q, dp, opt);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200000; ++i) {
    const double x = chain.lower()[0] - q[0] + (chain.upper()[0] - chain.lower()[0]) * i / 200000.0;
    best = std::min(best, adapt::cycle_point_loss(chain, q, Eigen::VectorXd::Constant(1, x), dp).value);
  }
  CHECK(r.loss == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("ob-ik converges on feasible two-joint targets") {
  const auto chain = testing::planar_chain(2);
  std::mt19937_64 rng(3);
  adapt::SolverOptions opt;
  opt.iterations = 10000;
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd q = random_q(chain, rng, 0.5);
    const Eigen::Vector2d truth(0.05 * (t + 1), -0.03 * t);
    const Eigen::VectorXd dp = model::finger_keypoints(chain, q + truth) - model::finger_keypoints(chain, q);
    CHECK(adapt::ob_ik_solve(chain, q, dp, opt).loss < 1e-10);
  }
}

TEST_CASE("ob-ik with self-collision separates overlapping boxes") {
  const auto boxes = testing::overlapping_boxes();
  const auto ctx = adapt::CollisionContext::build(boxes, 64, 3);
  const Eigen::VectorXd q = Eigen::Vector2d(0.0, 0.05);
  const Eigen::VectorXd dp = Eigen::VectorXd::Zero(12);
  const auto plain = adapt::ob_ik_solve(boxes, q, dp);
  const auto sc = adapt::ob_ik_sc_solve(boxes, ctx, q, dp);
  const double before = adapt::self_collision_loss(boxes, ctx, q + plain.dj).value;
  const double after = adapt::self_collision_loss(boxes, ctx, q + sc.dj).value;
  CHECK(after < before);
}

TEST_CASE("untrained adaptation net predicts zero") {
  const auto hand = testing::load_hand("spatial3");
  adapt::AdaptationNet net(hand, 4);
  CHECK(net.input_dim() == hand.dof() + 12 * hand.finger_count());
  std::mt19937_64 rng(1);
  const Eigen::VectorXd q = random_q(hand, rng);
  const Eigen::VectorXd dp = Eigen::VectorXd::Constant(18, 0.004);
  const Eigen::VectorXd dj = net.predict(q, model::finger_keypoints(hand, q), dp);
  CHECK(dj.size() == hand.dof());
  CHECK(dj.norm() == 0.0);

  adapt::TrainConfig cfg;
  cfg.updates = 0;
  const auto res = adapt::train_adaptation(net, hand, cfg);
  CHECK(res.loss.empty());
  CHECK(net.predict(q, model::finger_keypoints(hand, q), dp).norm() == 0.0);
  cfg.updates = cfg.max_updates + 1;
  CHECK_THROWS(adapt::train_adaptation(net, hand, cfg));
}

TEST_CASE("graph and direct prediction agree; checkpoints round trip") {
  const auto hand = testing::load_hand("planar2");
  adapt::AdaptationNet net(hand, 4);
  adapt::TrainConfig cfg;
  cfg.updates = 30;
  cfg.batch = 32;
  const auto res = adapt::train_adaptation(net, hand, cfg);
  REQUIRE(res.loss.size() == 30);
  std::mt19937_64 rng(1);
  const Eigen::VectorXd q = random_q(hand, rng);
  const Eigen::VectorXd kp = model::finger_keypoints(hand, q);
  const Eigen::VectorXd dp = Eigen::VectorXd::Constant(12, 0.003);
  nn::Graph g;
  const Eigen::VectorXd via_graph = g.value(net.forward(g, net.inputs({q}, {kp}, {dp}))).row(0).transpose();
  const Eigen::VectorXd direct = net.predict(q, kp, dp);
  CHECK((via_graph - direct).norm() < 1e-12);
  CHECK(direct.norm() > 0.0);

  const auto path = std::filesystem::temp_directory_path() / "dexgrasp_adapt.bin";
  net.save(path);
  adapt::AdaptationNet other(hand, 99);
  other.load(path);
  CHECK(other.predict(q, kp, dp) == direct);
  adapt::AdaptationNet wrong(testing::load_hand("spatial3"), 1);
  CHECK_THROWS(wrong.load(path));
  std::filesystem::remove(path);
}
