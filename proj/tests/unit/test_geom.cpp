#include "dexgrasp/geom/bvh.hpp"
#include "dexgrasp/geom/camera.hpp"
#include "dexgrasp/geom/convex_hull.hpp"
#include "dexgrasp/geom/distance.hpp"
#include "dexgrasp/geom/gripper_queries.hpp"
#include "dexgrasp/geom/ply.hpp"
#include "dexgrasp/geom/point_index.hpp"
#include "dexgrasp/geom/scene.hpp"

#include "oracles/brute_force.hpp"
#include "oracles/fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <random>

using namespace dexgrasp;
using geom::Mesh;
using geom::Vec3;

namespace {

Vec3 random_in_box(std::mt19937_64& rng, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  return {u(rng), u(rng), u(rng)};
}

// Icosphere rotated so that one of its vertices sits exactly on +x.
Mesh sphere_with_vertex_on_x(double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  const Vec3 v = Vec3(t, 0.0, 1.0).normalized();
  const Eigen::Quaterniond align = Eigen::Quaterniond::FromTwoVectors(v, Vec3::UnitX());
  geom::Transform tf = geom::Transform::Identity();
  tf.linear() = align.toRotationMatrix();
  return Mesh::icosphere(radius, 3).transformed(tf);
}

Mesh triangle_soup(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mesh m;
  for (int i = 0; i < count; ++i) {
    const Vec3 c = random_in_box(rng, 1.0);
    const int base = static_cast<int>(m.vertices.size());
    for (int k = 0; k < 3; ++k) m.vertices.push_back(c + random_in_box(rng, 0.1));
    m.triangles.push_back({base, base + 1, base + 2});
  }
  return m;
}

}  // namespace

TEST_CASE("sphere closest point") {
  geom::Scene scene;
  scene.add_mesh(sphere_with_vertex_on_x(1.0), geom::Transform::Identity(), true);
  scene.build();
  const auto hit = scene.closest(Vec3(2, 0, 0));
  CHECK(hit.distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((hit.point - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK(hit.source == 1);
  CHECK(hit.normal.norm() == doctest::Approx(1.0));

  const Mesh& m = scene.primitives()[0].mesh;
  const Vec3 on_surface = (m.vertex(7, 0) + m.vertex(7, 1) + m.vertex(7, 2)) / 3.0;
  CHECK(scene.closest(on_surface).distance < 1e-12);
}

TEST_CASE("bvh closest matches brute force") {
  const std::vector<Mesh> meshes = {Mesh::icosphere(0.3, 3), triangle_soup(3000, 5),
                                    Mesh::box(Vec3(0.2, 0.5, 0.1)), Mesh::pyramid(0.4, 0.3)};
  std::mt19937_64 rng(11);
  for (const Mesh& mesh : meshes) {
    REQUIRE(mesh.size() <= 5000);
    const geom::Bvh bvh(mesh);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p = random_in_box(rng, 1.5);
      const auto hit = bvh.closest(p);
      const auto ref = testing::brute_closest(mesh, p);
      REQUIRE(std::abs(hit.distance - ref.distance) < 1e-9);
      CHECK(std::abs((hit.point - p).norm() - hit.distance) < 1e-9);
    }
  }
}

TEST_CASE("triangle pair distance matches sampled minimum") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 a0 = random_in_box(rng, 1), a1 = random_in_box(rng, 1), a2 = random_in_box(rng, 1);
    const Vec3 off = random_in_box(rng, 1.5);
    const Vec3 b0 = off + random_in_box(rng, 1), b1 = off + random_in_box(rng, 1),
               b2 = off + random_in_box(rng, 1);
    Vec3 pa, pb;
    const double d = geom::triangle_triangle_distance(a0, a1, a2, b0, b1, b2, pa, pb);
    CHECK(std::abs((pa - pb).norm() - d) < 1e-9);
    // every sample of triangle a is at least d from triangle b
    double sampled = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 20; ++s)
      for (int t = 0; s + t <= 20; ++t) {
        const Vec3 p = a0 + (a1 - a0) * (s / 20.0) + (a2 - a0) * (t / 20.0);
        const Vec3 c = testing::triangle_closest(p, b0, b1, b2);
        sampled = std::min(sampled, (c - p).norm());
      }
    CHECK(d <= sampled + 1e-12);
    CHECK(sampled - d < 0.2);
  }
}

TEST_CASE("convex hull of a cube") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back((i & 1) - 0.5, ((i >> 1) & 1) - 0.5, ((i >> 2) & 1) - 0.5);
  pts.emplace_back(0.1, 0.2, -0.1);  // interior
  const auto hull = geom::convex_hull(pts);
  for (const auto& f : hull.faces) CHECK(f.normal.norm() == doctest::Approx(1.0));
  CHECK(geom::signed_distance_hull(hull, Vec3::Zero()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(geom::signed_distance_hull(hull, Vec3(2, 0, 0)) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("convex hull rejects degenerate input") {
  std::vector<Vec3> flat = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0), Vec3(0.3, 0.4, 0)};
  CHECK_THROWS_WITH_AS(geom::convex_hull(flat), "degenerate hull", geom::DegenerateHullError);
  std::vector<Vec3> three = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  CHECK_THROWS_AS(geom::convex_hull(three), geom::DegenerateHullError);
}

TEST_CASE("hull signed distance matches half-space oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(random_in_box(rng, 1.0));
    const auto hull = geom::convex_hull(pts);
    for (const Vec3& v : pts)
      for (const auto& f : hull.faces) CHECK(f.normal.dot(v) <= f.offset + 1e-9);
    const auto planes = testing::brute_hull_planes(pts);
    for (int i = 0; i < 200; ++i) {
      const Vec3 p = random_in_box(rng, 2.0);
      CHECK(std::abs(geom::signed_distance_hull(hull, p) - testing::half_space_signed_distance(planes, p)) <
            1e-9);
    }
  }
}

TEST_CASE("hull signed distance is 1-Lipschitz along rays") {
  std::mt19937_64 rng(8);
  std::vector<Vec3> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(random_in_box(rng, 0.5));
  const auto hull = geom::convex_hull(pts);
  for (int r = 0; r < 50; ++r) {
    const Vec3 origin = random_in_box(rng, 1.0);
    const Vec3 dir = random_in_box(rng, 1.0).normalized();
    double prev = geom::signed_distance_hull(hull, origin);
    for (int s = 1; s <= 100; ++s) {
      const double cur = geom::signed_distance_hull(hull, origin + dir * (0.02 * s));
      CHECK(std::abs(cur - prev) <= 0.02 + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("k nearest matches brute force") {
  std::mt19937_64 rng(4);
  std::vector<Vec3> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(random_in_box(rng, 1.0));
  const geom::PointIndex index(pts);
  for (int i = 0; i < 200; ++i) {
    const Vec3 q = random_in_box(rng, 1.5);
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return (pts[a] - q).squaredNorm() < (pts[b] - q).squaredNorm();
    });
    double dist = 0.0;
    CHECK(index.nearest(q, &dist) == order[0]);
    CHECK(dist == doctest::Approx((pts[order[0]] - q).norm()));
    const auto knn = index.k_nearest(q, 16);
    REQUIRE(knn.size() == 16);
    for (int k = 0; k < 16; ++k) CHECK(knn[k] == order[k]);
  }
}

TEST_CASE("pca normals on a plane") {
  std::mt19937_64 rng(2);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) {
    Vec3 p = random_in_box(rng, 1.0);
    p.z() = 0.0;
    pts.push_back(p);
  }
  const geom::PointIndex index(pts);
  for (const Vec3& n : geom::estimate_normals(index, 16, Vec3(0, 0, 5)))
    CHECK(n.z() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scene cloud queries use nearest neighbour") {
  geom::PointCloud cloud;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    cloud.points.push_back(random_in_box(rng, 0.1));
    cloud.foreground.push_back(i % 2);
  }
  geom::Scene scene;
  scene.set_cloud(cloud, Vec3(0, 0, 1));
  scene.build();
  const Vec3 q(0.05, 0.3, -0.02);
  int best = 0;
  for (int i = 1; i < 300; ++i)
    if ((cloud.points[i] - q).norm() < (cloud.points[best] - q).norm()) best = i;
  const auto hit = scene.closest(q);
  CHECK(hit.distance == doctest::Approx((cloud.points[best] - q).norm()));
  CHECK(hit.source == cloud.foreground[best]);
}

TEST_CASE("table plane and background flags") {
  geom::Scene scene;
  scene.add_mesh(Mesh::icosphere(0.04, 2), geom::Transform(Eigen::Translation3d(0, 0, 0.04)), true);
  scene.set_table(0.0);
  scene.build();
  const auto below = scene.closest(Vec3(0.3, 0.0, 0.01));
  CHECK(below.source == 0);
  CHECK(below.distance == doctest::Approx(0.01));
  CHECK(scene.closest(Vec3(0.0, 0.0, 0.2)).source == 1);
}

TEST_CASE("scene file loads") {
  const auto scene = geom::load_scene(testing::fixture("scenes/box_table.json"));
  CHECK(scene.has_foreground());
  CHECK(scene.primitives().size() >= 2);
  CHECK(scene.plane().has_value());
}

TEST_CASE("partial view of a sphere") {
  geom::Scene scene;
  const Mesh sphere = Mesh::icosphere(0.05, 3);
  scene.add_mesh(sphere, geom::Transform::Identity(), true);
  scene.build();
  geom::Camera cam;
  cam.pose = geom::Camera::look_at(Vec3(0, 0, 0.4), Vec3::Zero(), Vec3::UnitY());
  const auto cloud = geom::partial_view_cull(scene, cam);
  REQUIRE(!cloud.empty());

  // sampled sphere surface: fraction of samples within a pixel of the culled cloud
  std::mt19937_64 rng(1);
  const auto samples = geom::sample_surface(sphere, 2000, rng);
  const geom::PointIndex index(cloud.points);
  int covered = 0;
  for (const Vec3& s : samples) {
    double d = 0.0;
    index.nearest(s, &d);
    covered += d < 2e-3;
  }
  CHECK(covered <= static_cast<int>(samples.size()) / 2);

  // each culled point is the first ray hit from the camera
  const Vec3 eye = cam.pose.translation();
  const double footprint = 0.4 / cam.fx;
  for (std::size_t i = 0; i < cloud.size(); i += 7) {
    const Vec3 p = cloud.points[i];
    const Vec3 dir = (p - eye).normalized();
    const double t = testing::brute_ray(sphere, eye, dir);
    CHECK(std::abs(t - (p - eye).norm()) < 1e-6);
    CHECK(testing::brute_closest(sphere, p).distance < footprint);
    CHECK(cloud.foreground[i] == 1);
  }
}

TEST_CASE("partial view of an empty scene") {
  geom::Scene scene;
  scene.build();
  CHECK(geom::partial_view_cull(scene, geom::Camera{}).empty());
}

TEST_CASE("ply round trip") {
  geom::PointCloud cloud;
  cloud.points = {Vec3(0.5, -0.25, 1.0), Vec3(0.125, 2.0, -3.0)};
  cloud.foreground = {1, 0};
  const auto path = std::filesystem::temp_directory_path() / "dexgrasp_roundtrip.ply";
  geom::write_cloud_ply(path, cloud);
  const auto back = geom::read_cloud_ply(path);
  REQUIRE(back.size() == 2);
  CHECK(back.points[1].isApprox(cloud.points[1]));
  CHECK(back.foreground == cloud.foreground);
  std::filesystem::remove(path);
}

TEST_CASE("initial poses on the upper hemisphere") {
  const Vec3 center(0.1, -0.2, 0.05);
  CHECK(geom::sample_initial_poses(center, 0, 1).empty());
  const auto poses = geom::sample_initial_poses(center, 200, 7);
  REQUIRE(poses.size() == 200);
  for (const auto& pose : poses) {
    const Vec3 pos = pose.translation;
    CHECK((pos - center).norm() == doctest::Approx(0.20).epsilon(1e-12));
    CHECK(pos.z() >= center.z());
    const geom::Mat3 r = pose.transform().linear();
    const Vec3 palm = r * Vec3::UnitZ();
    const double cosang = std::clamp(palm.dot((center - pos).normalized()), -1.0, 1.0);
    CHECK(std::acos(cosang) <= 1e-7);  // acos amplifies rounding near 1
    CHECK(std::abs(palm.dot((center - pos).normalized()) - 1.0) <= 1e-12);
    const Vec3 thumb = r * Vec3::UnitX();
    const Vec3 up = (Vec3::UnitZ() - palm * palm.z());
    if (up.norm() > 1e-6) CHECK(thumb.dot(up.normalized()) == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto again = geom::sample_initial_poses(center, 200, 7);
  CHECK(again[17].translation == poses[17].translation);
}

TEST_CASE("link surface sampling is deterministic") {
  const auto hand = testing::load_hand("planar2");
  const auto a = geom::sample_link_surface(hand, 64, 9);
  const auto b = geom::sample_link_surface(hand, 64, 9);
  REQUIRE(a.size() == hand.links().size());
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK(a[l].size() == 64);
    for (std::size_t i = 0; i < a[l].size(); ++i) CHECK(a[l][i] == b[l][i]);
    const geom::Bvh& bvh = hand.links()[l].bvh;
    for (const Vec3& p : a[l]) CHECK(bvh.closest(p).distance < 1e-12);
  }
}
