#pragma once

#include "dexgrasp/geom/mesh.hpp"
#include "dexgrasp/model/kinematics.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace dexgrasp::geom {

/// Gripper posed at one configuration, ready for nearest-surface queries.
/// Link meshes stay in their local frames; queries are mapped into each link.
class PosedGripper {
 public:
  PosedGripper(const model::GripperModel& model, const Eigen::VectorXd& q, const model::BasePose& base);

  /// Nearest point over all link surfaces; `source` is the link index.
  ClosestHit closest(const Vec3& p) const;
  /// Nearest point on one link.
  ClosestHit closest_on_link(int link, const Vec3& p) const;

  const model::GripperModel& model() const { return *model_; }
  const std::vector<Transform>& frames() const { return frames_; }
  /// World pose of the palm frame.
  Transform palm() const;
  const model::BasePose& base() const { return base_; }

  /// World-space surface mesh of one link.
  Mesh link_mesh(int link) const;

 private:
  const model::GripperModel* model_;
  model::BasePose base_;
  std::vector<Transform> frames_;
  std::vector<Transform> inverse_;
};

ClosestHit closest_point_gripper(const model::GripperModel& model, const Eigen::VectorXd& q,
                                 const model::BasePose& base, const Vec3& p);

/// Area-weighted uniform surface samples; `triangles` receives the source face of each point.
std::vector<Vec3> sample_surface(const Mesh& mesh, int count, std::mt19937_64& rng,
                                 std::vector<int>* triangles = nullptr);

/// `points_per_link` surface samples per link in link-local frames. Links
/// without geometry get an empty set. Deterministic for a given seed.
std::vector<std::vector<Vec3>> sample_link_surface(const model::GripperModel& model, int points_per_link,
                                                   std::uint64_t seed);

/// Initial base poses on the upper hemisphere of radius `radius` around
/// `center`: the local `palm_normal` points at the centre and the local
/// `thumb` axis points as close to world +z as the palm constraint allows.
std::vector<model::BasePose> sample_initial_poses(const Vec3& center, int count, std::uint64_t seed,
                                                  const Vec3& palm_normal = Vec3::UnitZ(),
                                                  const Vec3& thumb = Vec3::UnitX(), double radius = 0.20);

/// Same, with the palm normal and thumb direction read from the gripper.
std::vector<model::BasePose> sample_initial_poses(const model::GripperModel& model, const Vec3& center,
                                                  int count, std::uint64_t seed, double radius = 0.20);

}  // namespace dexgrasp::geom
