#pragma once

#include <Eigen/Geometry>

#include <limits>

namespace dexgrasp::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Transform = Eigen::Isometry3d;

/// Axis-aligned bounding box.
struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  bool empty() const { return (min.array() > max.array()).any(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }

  /// Squared distance from a point to the box (zero inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (min - p).cwiseMax(p - max).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
  }

  /// Squared distance between two boxes (zero when overlapping).
  double squared_distance(const Aabb& b) const {
    const Vec3 d = (min - b.max).cwiseMax(b.min - max).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
  }
};

/// Result of a nearest-surface query.
///
/// `source` is the link index for gripper queries and the foreground flag
/// (1 = object, 0 = background) for scene queries. `primitive` is the
/// triangle (or cloud point) index inside that source.
struct ClosestHit {
  double distance = std::numeric_limits<double>::infinity();
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int source = -1;
  int primitive = -1;

  bool valid() const { return source >= 0; }
};

}  // namespace dexgrasp::geom
