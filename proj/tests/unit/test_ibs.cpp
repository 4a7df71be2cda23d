#include "dexgrasp/ibs/ibs.hpp"

#include "oracles/fixtures.hpp"
#include "oracles/synthetic.hpp"

#include <doctest.h>

#include <random>

using namespace dexgrasp;
using geom::Mesh;
using geom::Vec3;

namespace {

constexpr double kRadius = 0.05;
constexpr double kOffset = 0.08;

model::BasePose at(double x) {
  model::BasePose b;
  b.translation = Vec3(x, 0, 0);
  return b;
}

geom::Scene sphere_scene(double x) {
  geom::Scene s;
  s.add_mesh(Mesh::icosphere(kRadius, 3), testing::translation(x, 0, 0), true);
  s.build();
  return s;
}

}  // namespace

TEST_CASE("two-sphere bisector plane") {
  const auto gripper = testing::mesh_gripper(Mesh::icosphere(kRadius, 3));
  const auto scene = sphere_scene(kOffset);
  const Eigen::VectorXd q = gripper.rest();
  const auto cloud = ibs::sample_ibs(scene, gripper, q, at(-kOffset));
  REQUIRE(cloud.size() == 4096);
  double worst_plane = 0.0, worst_eq = 0.0;
  for (const auto& p : cloud.points) {
    worst_plane = std::max(worst_plane, std::abs(p.world.x()));
    worst_eq = std::max(worst_eq, std::abs(p.d_s - p.d_g));
    CHECK(p.b_s == 1);
    CHECK(p.component == 0);
    CHECK(std::abs(p.a_g) <= 1.0);
    CHECK((p.c - (p.world - Vec3(-kOffset, 0, 0))).norm() < 1e-12);
  }
  CHECK(worst_plane <= 2e-3);
  CHECK(worst_eq <= 1e-3);

  const auto f = cloud.features();
  CHECK(f.cols() == 8 + gripper.finger_count());
  for (Eigen::Index i = 0; i < f.rows(); ++i) CHECK(f.block(i, 6, 1, 2).sum() == 1.0);
}

TEST_CASE("swapping gripper and scene swaps distances") {
  const auto gripper = testing::mesh_gripper(Mesh::icosphere(kRadius, 3));
  const Eigen::VectorXd q = gripper.rest();
  const auto scene_r = sphere_scene(kOffset);
  const auto scene_l = sphere_scene(-kOffset);
  const geom::PosedGripper left(gripper, q, at(-kOffset));
  const geom::PosedGripper right(gripper, q, at(kOffset));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const auto a = ibs::featurize_point(scene_r, left, p);
    const auto b = ibs::featurize_point(scene_l, right, p);
    CHECK(std::abs(a.d_s - b.d_g) < 1e-12);
    CHECK(std::abs(a.d_g - b.d_s) < 1e-12);
  }
}

TEST_CASE("feature length and component labels on a five-finger hand") {
  const auto hand = testing::load_hand("shadow5");
  const auto scene = geom::load_scene(testing::fixture("scenes/sphere_table.json"));
  const geom::PosedGripper posed(hand, hand.rest(), model::BasePose{});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const auto f = ibs::featurize_point(scene, posed, p);
    // closest-point oracle over posed links
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int l = 0; l < static_cast<int>(hand.links().size()); ++l) {
      if (hand.links()[l].mesh.empty()) continue;
      const double d = posed.closest_on_link(l, p).distance;
      if (d < dist) {
        dist = d;
        best = l;
      }
    }
    CHECK(f.component == hand.links()[best].component);
    CHECK(f.d_g == doctest::Approx(dist).epsilon(1e-12));
  }
  ibs::IbsFeatureCloud cloud;
  cloud.component_count = hand.component_count();
  CHECK(cloud.feature_dim() == 13);

  // the thumb tip link is labelled with the thumb component
  const int thumb_tip = hand.fingers()[0].tip.link;
  const Vec3 tip = posed.frames()[thumb_tip] * hand.fingers()[0].tip.offset;
  const auto near_tip = ibs::featurize_point(scene, posed, tip + Vec3(0, 0, 1e-4));
  CHECK(near_tip.component == 1);
}

TEST_CASE("background hits clear the foreground flag") {
  const auto hand = testing::load_hand("spatial3");
  const auto scene = geom::load_scene(testing::fixture("scenes/sphere_table.json"));
  const geom::PosedGripper posed(hand, hand.rest(), model::BasePose{});
  CHECK(ibs::featurize_point(scene, posed, Vec3(0.3, 0.3, 0.001)).b_s == 0);
  CHECK(ibs::featurize_point(scene, posed, Vec3(0.0, 0.0, 0.081)).b_s == 1);
}

TEST_CASE("ibs on a fixture hand is rigid invariant and deterministic") {
  const auto hand = testing::load_hand("spatial3");
  const auto scene = geom::load_scene(testing::fixture("scenes/sphere_table.json"));
  const auto poses = geom::sample_initial_poses(hand, scene.object_center(), 1, 3, 0.12);
  ibs::IbsParams params;
  params.output_size = 512;
  params.seed = 9;
  const auto a = ibs::sample_ibs(scene, hand, hand.rest(), poses[0], params);
  const auto b = ibs::sample_ibs(scene, hand, hand.rest(), poses[0], params);
  REQUIRE(a.size() == 512);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i].world == b.points[i].world);
  double worst = 0.0;
  for (const auto& p : a.points) worst = std::max(worst, std::abs(p.d_s - p.d_g));
  CHECK(worst <= params.accept_tolerance());

  const geom::Transform motion = testing::translation(0.3, -0.1, 0.2) *
                                 geom::Transform(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
  const auto moved_scene = scene.transformed(motion);
  const auto moved_base = model::BasePose::from_transform(motion * poses[0].transform());
  const auto c = ibs::sample_ibs(moved_scene, hand, hand.rest(), moved_base, params);
  const auto fa = a.features();
  const auto fc = c.features();
  REQUIRE(fa.rows() == fc.rows());
  CHECK((fa - fc).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("no ibs when the scene is out of range") {
  const auto hand = testing::load_hand("planar2");
  geom::Scene scene;
  scene.add_mesh(Mesh::icosphere(0.05, 2), testing::translation(2.0, 0, 0), true);
  scene.build();
  CHECK_THROWS_WITH(ibs::sample_ibs(scene, hand, hand.rest(), model::BasePose{}), "no IBS in range");
}

TEST_CASE("farthest point sampling") {
  std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 0, 0)};
  CHECK(ibs::farthest_point_sample(pts, 3, 0) == std::vector<int>{0, 2, 3});
}

TEST_CASE("contact maps") {
  const auto hand = testing::load_hand("spatial3");
  const auto scene = geom::load_scene(testing::fixture("scenes/sphere_table.json"));
  const auto pose = geom::sample_initial_poses(hand, scene.object_center(), 1, 3, 0.12)[0];
  const auto ocm = ibs::extract_ocm(scene, hand, hand.rest(), pose, 256, 1);
  const auto gcm = ibs::extract_gcm(scene, hand, hand.rest(), pose, 256, 1);
  CHECK(ocm.features.rows() == 256);
  CHECK(ocm.features.cols() == hand.finger_count() + 6);
  CHECK(gcm.features.cols() == hand.finger_count() + 6);
  for (Eigen::Index i = 0; i < 256; ++i) {
    CHECK(ocm.features.block(i, 0, 1, 3).norm() <= scene.object_radius() + 1e-9);
    CHECK(ocm.features.block(i, 5, 1, 4).sum() == 1.0);
    CHECK(gcm.features.block(i, 5, 1, 4).sum() == 1.0);
  }
}
