#pragma once

#include "dexgrasp/geom/mesh.hpp"

#include <vector>

namespace dexgrasp::geom {

/// Relative slack under which closest-point candidates count as tied; the
/// lowest index wins a tie so results do not depend on round-off.
inline constexpr double kTieSlack = 1e-9;

/// Bounding-volume hierarchy over the triangles of a mesh, specialised for
/// nearest-surface queries. Immutable after construction.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(const Mesh& mesh, int leaf_size = 4);

  /// Nearest point on the mesh. `source` in the result is left at -1; the
  /// caller tags it. Returns an invalid hit for an empty mesh.
  ClosestHit closest(const Vec3& p) const;

  /// Nearest point, only searching closer than `bound`. Invalid if none is.
  ClosestHit closest(const Vec3& p, double bound) const;

  struct TrianglePair {
    double distance = std::numeric_limits<double>::infinity();
    Vec3 on_mesh = Vec3::Zero();
    Vec3 on_query = Vec3::Zero();
    int primitive = -1;
  };
  /// Nearest pair between the mesh and a query triangle.
  TrianglePair closest_to_triangle(const Vec3& a, const Vec3& b, const Vec3& c,
                                   double bound = std::numeric_limits<double>::infinity()) const;

  const Aabb& bounds() const;
  bool empty() const { return nodes_.empty(); }
  std::size_t triangle_count() const { return tris_.size(); }
  const Vec3& normal(int primitive) const { return normals_[primitive]; }

 private:
  struct Node {
    Aabb box;
    int left = -1;   // child index, or -1 for leaves
    int right = -1;
    int begin = 0;   // range into order_ for leaves
    int count = 0;
  };
  struct Tri {
    Vec3 a, b, c;
  };

  int build(int begin, int end, int leaf_size);

  std::vector<Node> nodes_;
  std::vector<Tri> tris_;
  std::vector<Vec3> normals_;
  std::vector<int> order_;
  std::vector<Aabb> tri_boxes_;
};

}  // namespace dexgrasp::geom
