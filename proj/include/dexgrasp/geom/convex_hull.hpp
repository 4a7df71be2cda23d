#pragma once

#include "dexgrasp/geom/types.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace dexgrasp::geom {

/// Closed convex polyhedron. Each face stores its outward unit normal and
/// plane offset so that `normal.dot(x) <= offset` holds inside.
struct ConvexHull {
  struct Face {
    std::array<int, 3> v;
    Vec3 normal;
    double offset;
  };
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  Vec3 centroid = Vec3::Zero();

  bool empty() const { return faces.empty(); }
};

class DegenerateHullError : public std::runtime_error {
 public:
  DegenerateHullError() : std::runtime_error("degenerate hull") {}
};

/// Incremental convex hull. Throws DegenerateHullError for fewer than four
/// points or coplanar input.
ConvexHull convex_hull(std::span<const Vec3> points);

/// Signed distance from `p` to the hull: positive inside (penetration depth),
/// negative outside. Evaluated as the minimum over face half-spaces, so
/// outside values are a lower bound on the Euclidean gap.
double signed_distance_hull(const ConvexHull& hull, const Vec3& p);

/// Same as above and also returns the index of the face attaining the minimum.
double signed_distance_hull(const ConvexHull& hull, const Vec3& p, int& face);

}  // namespace dexgrasp::geom
