#include "dexgrasp/metrics/metrics.hpp"

#include "dexgrasp/geom/distance.hpp"
#include "oracles/facet_enumeration.hpp"
#include "oracles/synthetic.hpp"

#include <doctest.h>

#include <random>

using namespace dexgrasp;
using geom::Mesh;
using geom::Transform;
using geom::Vec3;

namespace {

metrics::Contact contact_at(const Vec3& outward, int component = 1) {
  metrics::Contact c;
  c.normal = outward.normalized();
  c.point = c.normal;
  c.component = component;
  return c;
}

std::vector<metrics::Contact> antipodal() { return {contact_at(Vec3::UnitX()), contact_at(-Vec3::UnitX())}; }

std::vector<metrics::Contact> tripod() {
  std::vector<metrics::Contact> cs;
  for (int i = 0; i < 3; ++i) {
    const double a = 2.0 * M_PI * i / 3.0 + 0.3;
    cs.push_back(contact_at(Vec3(std::cos(a), std::sin(a), 0.2 * (i - 1))));
  }
  return cs;
}

geom::Scene sphere_scene() {
  geom::Scene s;
  s.add_mesh(Mesh::icosphere(0.05, 2), Transform::Identity(), true);
  s.build();
  return s;
}

model::BasePose at(const Vec3& t) {
  model::BasePose b;
  b.translation = t;
  return b;
}

double brute_link_distance(const Mesh& a, const Mesh& b) {
  double best = std::numeric_limits<double>::infinity();
  Vec3 p, q;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    for (int j = 0; j < static_cast<int>(b.size()); ++j)
      best = std::min(best, geom::triangle_triangle_distance(a.vertex(i, 0), a.vertex(i, 1), a.vertex(i, 2),
                                                             b.vertex(j, 0), b.vertex(j, 1), b.vertex(j, 2), p, q));
  return best;
}

}  // namespace

TEST_CASE("q1 is zero with fewer than two contacts") {
  CHECK(metrics::q1({}, Transform::Identity(), 1.0) == 0.0);
  CHECK(metrics::q1({contact_at(Vec3::UnitZ())}, Transform::Identity(), 1.0) == 0.0);
}

TEST_CASE("antipodal grasp on a unit sphere matches facet enumeration") {
  const auto wrenches = metrics::contact_wrenches(antipodal(), Transform::Identity(), 1.0, {});
  REQUIRE(wrenches.size() == 32);
  const double value = metrics::q1(antipodal(), Transform::Identity(), 1.0);
  CHECK(value > 0.0);
  CHECK(std::abs(value - testing::brute_origin_depth(wrenches)) < 1e-6);
}

TEST_CASE("tripod grasp matches facet enumeration") {
  metrics::Q1Params p;
  p.cone_edges = 4;
  const auto wrenches = metrics::contact_wrenches(tripod(), Transform::Identity(), 1.0, p);
  const double value = metrics::q1(tripod(), Transform::Identity(), 1.0, p);
  CHECK(value > 0.0);
  CHECK(std::abs(value - testing::brute_origin_depth(wrenches)) < 1e-6);
}

TEST_CASE("same-side contacts are not force closed") {
  const std::vector<metrics::Contact> cs = {contact_at(Vec3(1, 0.1, 0)), contact_at(Vec3(1, -0.1, 0))};
  CHECK(metrics::q1(cs, Transform::Identity(), 1.0) == 0.0);
}

TEST_CASE("q1 is invariant to rigid motion of object and contacts") {
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  const double base = metrics::q1(tripod(), Transform::Identity(), 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Transform t = Transform::Identity();
    t.linear() = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
    t.translation() = Vec3(n(rng), n(rng), n(rng));
    auto cs = tripod();
    for (auto& c : cs) {
      c.point = t * c.point;
      c.normal = t.linear() * c.normal;
    }
    CHECK(std::abs(metrics::q1(cs, t, 1.0) - base) < 1e-9);
  }
}

TEST_CASE("q1 grows with friction and cone resolution") {
  double prev = 0.0;
  for (double mu = 0.1; mu <= 1.0 + 1e-12; mu += 0.1) {
    metrics::Q1Params p;
    p.mu = mu;
    const double v = metrics::q1(tripod(), Transform::Identity(), 1.0, p);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  prev = 0.0;
  for (int m : {8, 16, 32}) {
    metrics::Q1Params p;
    p.cone_edges = m;
    const double v = metrics::q1(antipodal(), Transform::Identity(), 1.0, p);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("hull of a 4-d cross polytope") {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 4; ++i)
    for (double s : {1.0, -1.0}) pts.push_back(s * Eigen::VectorXd::Unit(4, i));
  const auto hull = metrics::convex_hull_nd(pts);
  REQUIRE(hull.full_dimensional);
  CHECK(hull.normals.size() == 16);
  CHECK(metrics::origin_depth(hull) == doctest::Approx(0.5));
  pts.resize(6);
  for (auto& p : pts) p(3) = 0.0;
  CHECK_FALSE(metrics::convex_hull_nd(pts).full_dimensional);
}

TEST_CASE("random 5-d hulls contain every point and match enumeration") {
  std::mt19937 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Eigen::VectorXd> pts(30, Eigen::VectorXd(5));
    for (auto& p : pts)
      for (int i = 0; i < 5; ++i) p(i) = n(rng) + (i == 0 ? 0.3 * trial : 0.0);
    const auto hull = metrics::convex_hull_nd(pts);
    for (std::size_t f = 0; f < hull.normals.size(); ++f)
      for (const auto& p : pts) CHECK(hull.normals[f].dot(p) <= hull.offsets[f] + 1e-9);
    CHECK(std::abs(metrics::origin_depth(hull) - testing::brute_origin_depth(pts)) < 1e-9);
  }
}

TEST_CASE("contacts against a sphere") {
  const auto scene = sphere_scene();
  const auto gripper = testing::mesh_gripper(Mesh::box(Vec3(0.02, 0.02, 0.02)));
  const Eigen::VectorXd q = gripper.rest();

  CHECK(metrics::detect_contacts(gripper, q, at(Vec3(0.2, 0, 0)), scene).empty());

  const auto touching = metrics::detect_contacts(gripper, q, at(Vec3(0.055, 0, 0)), scene);
  REQUIRE(touching.size() == 1);
  CHECK(touching[0].distance == 0.0);
  CHECK(touching[0].component == 0);
  CHECK(metrics::finger_contact_count(touching) == 0);

  for (double x : {0.0605, 0.0612, 0.0619}) {
    const auto base = at(Vec3(x, 0.003, -0.002));
    const auto cs = metrics::detect_contacts(gripper, q, base, scene);
    const double oracle =
        brute_link_distance(gripper.links()[0].mesh.transformed(base.transform()), scene.foreground_mesh());
    REQUIRE(cs.size() == (oracle <= 0.002 ? 1u : 0u));
    if (cs.empty()) continue;
    CHECK(std::abs(cs[0].distance - oracle) < 1e-9);
    CHECK(cs[0].normal.x() > 0.9);
    CHECK(std::abs((cs[0].gripper_point - cs[0].point).norm() - oracle) < 1e-9);
  }
}

TEST_CASE("collision statistics") {
  const auto boxes = testing::overlapping_boxes();
  const auto ctx = adapt::CollisionContext::build(boxes);
  Eigen::VectorXd apart(2), overlap(2);
  apart << 0.0, 0.4;
  overlap << 0.0, 0.0;
  const auto s = metrics::collision_stats({apart, overlap, overlap, apart}, boxes, ctx);
  CHECK(s.frames == 4);
  CHECK(s.colliding == 2);
  CHECK(s.percentage == doctest::Approx(50.0));
  CHECK(s.mean_loss_colliding == doctest::Approx(adapt::self_collision_loss(boxes, ctx, overlap).value));
}
