#pragma once

#include "dexgrasp/geom/bvh.hpp"
#include "dexgrasp/geom/mesh.hpp"
#include "dexgrasp/geom/point_index.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dexgrasp::geom {

/// A segmented point cloud: positions plus a per-point foreground flag.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<std::uint8_t> foreground;
  std::vector<Vec3> normals;  // optional, same length as points when present

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Grasping scene: world-space meshes with foreground flags, an optional
/// horizontal table plane, and optionally a segmented point cloud in place
/// of (or alongside) meshes. Call `build()` once before querying.
class Scene {
 public:
  struct Primitive {
    Mesh mesh;  // world frame
    bool foreground = true;
    std::string name;
  };

  void add_mesh(const Mesh& local, const Transform& pose, bool foreground, std::string name = {});
  /// Horizontal support plane z = height.
  void set_table(double height, bool foreground = false);
  /// General support plane through `point` with unit `normal` (pointing to free space).
  void set_plane(const Vec3& point, const Vec3& normal, bool foreground = false);
  void set_cloud(PointCloud cloud, const Vec3& viewpoint = Vec3::Zero(), int normal_k = 16);
  void build();

  /// Exact nearest scene point over all primitives.
  ClosestHit closest(const Vec3& p) const;

  bool empty() const;
  bool has_foreground() const;
  const std::vector<Primitive>& primitives() const { return primitives_; }
  struct Plane {
    Vec3 point;
    Vec3 normal;
    bool foreground = false;
  };
  const std::optional<Plane>& plane() const { return plane_; }
  const PointCloud& cloud() const { return cloud_; }

  /// Merged foreground meshes (world frame).
  Mesh foreground_mesh() const;
  /// Merged meshes of every primitive (world frame).
  Mesh all_meshes() const;
  /// Centre of the foreground bounding box.
  Vec3 object_center() const;
  /// Radius of the bounding sphere of the foreground around `object_center()`.
  double object_radius() const;

  /// Copy of the scene with every primitive moved by `t`.
  Scene transformed(const Transform& t) const;

 private:
  std::vector<Primitive> primitives_;
  std::optional<Plane> plane_;
  PointCloud cloud_;
  Vec3 viewpoint_ = Vec3::Zero();
  int normal_k_ = 16;

  Bvh bvh_;
  std::vector<std::uint8_t> tri_foreground_;
  PointIndex cloud_index_;
  bool built_ = false;
};

/// Loads a scene description (JSON). Mesh paths resolve against the file's directory.
Scene load_scene(const std::filesystem::path& path);

}  // namespace dexgrasp::geom
