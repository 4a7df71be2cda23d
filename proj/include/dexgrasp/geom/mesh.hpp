#pragma once

#include "dexgrasp/geom/types.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace dexgrasp::geom {

/// Indexed triangle mesh. Faces wind counter-clockwise seen from outside.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  std::size_t size() const { return triangles.size(); }

  Vec3 vertex(int tri, int corner) const { return vertices[triangles[tri][corner]]; }
  Vec3 face_normal(int tri) const;
  double face_area(int tri) const;
  double surface_area() const;
  Aabb bounds() const;

  Mesh transformed(const Transform& t) const;
  Mesh scaled(const Vec3& s) const;

  /// Appends another mesh; vertex indices of `other` are shifted.
  void append(const Mesh& other);

  /// Axis-aligned box with the given full extents, centred at the origin.
  static Mesh box(const Vec3& extents);
  /// Geodesic sphere built by subdividing an icosahedron.
  static Mesh icosphere(double radius, int subdivisions);
  /// Square pyramid standing on z = 0 with its apex at (0, 0, height).
  static Mesh pyramid(double base, double height);
};

/// Reads a Wavefront OBJ file (v / f records; polygons are fan-triangulated).
Mesh load_obj(const std::filesystem::path& path);
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace dexgrasp::geom
