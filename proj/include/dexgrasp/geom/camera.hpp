#pragma once

#include "dexgrasp/geom/scene.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace dexgrasp::geom {

/// Pinhole camera. The pose maps camera coordinates to world; the camera
/// looks along its +z axis with +x right and +y down.
struct Camera {
  double fx = 300.0;
  double fy = 300.0;
  double cx = 160.0;
  double cy = 120.0;
  int width = 320;
  int height = 240;
  double near = 1e-3;
  Transform pose = Transform::Identity();

  /// Pose that places the camera at `eye` looking at `target`.
  static Transform look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());
};

/// Intrinsics plus either "eye"/"target" (optional "up") or a "pose" transform.
Camera camera_from_json(const nlohmann::json& j);
Camera load_camera(const std::filesystem::path& path);

/// Depth image: row-major, +inf where nothing was hit.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<std::uint8_t> foreground;
};

/// Z-buffer render of the scene's meshes and table plane.
DepthImage render_depth(const Scene& scene, const Camera& camera);

/// Renders the scene and back-projects every covered pixel to a world
/// point, keeping only first-hit surfaces. Normals face the camera.
PointCloud partial_view_cull(const Scene& scene, const Camera& camera);

}  // namespace dexgrasp::geom
