#pragma once

#include "dexgrasp/geom/types.hpp"

#include <vector>

namespace dexgrasp::geom {

/// Static k-d tree over a point set for nearest-neighbour queries.
class PointIndex {
 public:
  PointIndex() = default;
  explicit PointIndex(std::vector<Vec3> points, int leaf_size = 8);

  /// Index of the nearest point and its distance. Returns -1 for an empty set.
  int nearest(const Vec3& q, double* distance = nullptr) const;

  /// The k nearest points, closest first.
  std::vector<int> k_nearest(const Vec3& q, int k) const;

  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  struct Node {
    Aabb box;
    int left = -1;
    int right = -1;
    int begin = 0;
    int count = 0;
  };
  int build(int begin, int end, int leaf_size);

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Unit normals by local PCA over the k nearest neighbours. Each normal is
/// flipped to face `viewpoint`.
std::vector<Vec3> estimate_normals(const PointIndex& index, int k, const Vec3& viewpoint);

}  // namespace dexgrasp::geom
