#pragma once

#include "dexgrasp/geom/gripper_queries.hpp"
#include "dexgrasp/geom/scene.hpp"
#include "dexgrasp/model/kinematics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dexgrasp::ibs {

using geom::Transform;
using geom::Vec3;

struct IbsParams {
  double sphere_radius = 0.18;
  int voxel_resolution = 20;
  double tau = 0.0;  // <= 0 selects half the voxel diagonal
  int refine_iterations = 10;
  double refine_tolerance = 1e-4;
  int output_size = 4096;
  std::uint64_t seed = 0;

  double cell() const { return 2.0 * sphere_radius / voxel_resolution; }
  double threshold() const;
  /// Largest |d_s - d_g| a refined point may keep.
  double accept_tolerance() const;
  void validate() const;
};

struct IbsPoint {
  Vec3 world = Vec3::Zero();
  Vec3 c = Vec3::Zero();  // palm frame
  double d_s = 0.0;
  double d_g = 0.0;
  std::uint8_t b_s = 0;
  int component = 0;  // index of the one-hot c_g
  double a_g = 0.0;
};

struct IbsFeatureCloud {
  std::vector<IbsPoint> points;
  int component_count = 0;
  Transform palm = Transform::Identity();  // world pose of the palm frame
  model::BasePose base;
  std::string scene_id;
  int survivors = 0;  // refined points before down-sampling or padding

  std::size_t size() const { return points.size(); }
  /// Feature width 8 + K: c, d_s, d_g, b_s, one-hot c_g, a_g.
  int feature_dim() const { return component_count + 7; }
  /// n x (8 + K) feature matrix.
  Eigen::MatrixXd features() const;
};

class NoIbsError : public std::runtime_error {
 public:
  NoIbsError() : std::runtime_error("no IBS in range") {}
};

/// Closest-point features of one query point against the scene and the posed gripper.
IbsPoint featurize_point(const geom::Scene& scene, const geom::PosedGripper& gripper, const Vec3& p);

/// Sampled interaction bisector surface between the scene and the gripper,
/// seeded on a palm-aligned voxel grid, refined, then down-sampled (or padded)
/// to exactly `params.output_size` points. Throws NoIbsError when no cell
/// straddles the bisector.
IbsFeatureCloud sample_ibs(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                           const model::BasePose& base, const IbsParams& params = {});

/// Greedy farthest-point subset of size `count`, started from `start`.
std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int count, int start);

/// Dense per-point feature cloud used by the OCM / GCM representations.
struct ContactMap {
  Eigen::MatrixXd features;  // n x (K + 6): coordinate, distance, foreground flag, one-hot
  Transform origin = Transform::Identity();
  int component_count = 0;
};

/// Object contact map: object-surface samples, origin at the object centre.
ContactMap extract_ocm(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                       const model::BasePose& base, int n, std::uint64_t seed = 0);

/// Gripper contact map: gripper-surface samples, origin at the gripper root keypoint.
ContactMap extract_gcm(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                       const model::BasePose& base, int n, std::uint64_t seed = 0);

}  // namespace dexgrasp::ibs
