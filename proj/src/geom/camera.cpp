#include "dexgrasp/geom/camera.hpp"

#include "dexgrasp/geom/pose_json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dexgrasp::geom {

Transform Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-9) x = z.cross(Vec3::UnitX());
  x.normalize();
  const Vec3 y = z.cross(x);  // image down
  Transform t = Transform::Identity();
  t.linear().col(0) = x;
  t.linear().col(1) = y;
  t.linear().col(2) = z;
  t.translation() = eye;
  return t;
}

namespace {

struct Raster {
  DepthImage image;
  std::vector<Vec3> normal;  // camera-facing world normal per pixel
};

Raster rasterize(const Scene& scene, const Camera& cam) {
  Raster r;
  DepthImage& img = r.image;
  img.width = cam.width;
  img.height = cam.height;
  const std::size_t npix = static_cast<std::size_t>(cam.width) * cam.height;
  img.depth.assign(npix, std::numeric_limits<double>::infinity());
  img.foreground.assign(npix, 0);
  r.normal.assign(npix, Vec3::Zero());

  const Transform world_to_cam = cam.pose.inverse();
  const Vec3 eye = cam.pose.translation();

  for (const auto& prim : scene.primitives()) {
    const Mesh& mesh = prim.mesh;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
      std::array<Vec3, 3> c;
      bool behind = false;
      for (int k = 0; k < 3; ++k) {
        c[k] = world_to_cam * mesh.vertex(t, k);
        if (c[k].z() < cam.near) behind = true;
      }
      // Triangles crossing the near plane are dropped rather than clipped.
      if (behind) continue;
      std::array<Eigen::Vector2d, 3> s;
      for (int k = 0; k < 3; ++k) {
        s[k] = {cam.fx * c[k].x() / c[k].z() + cam.cx, cam.fy * c[k].y() / c[k].z() + cam.cy};
      }
      const double area = (s[1] - s[0]).x() * (s[2] - s[0]).y() - (s[1] - s[0]).y() * (s[2] - s[0]).x();
      if (std::abs(area) < 1e-300) continue;
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min({s[0].x(), s[1].x(), s[2].x()}) - 0.5)));
      const int x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(std::max({s[0].x(), s[1].x(), s[2].x()}) - 0.5)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min({s[0].y(), s[1].y(), s[2].y()}) - 0.5)));
      const int y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(std::max({s[0].y(), s[1].y(), s[2].y()}) - 0.5)));
      Vec3 n = mesh.face_normal(t);
      if (n.dot(eye - mesh.vertex(t, 0)) < 0.0) n = -n;
      for (int py = y0; py <= y1; ++py) {
        for (int px = x0; px <= x1; ++px) {
          const Eigen::Vector2d q(px + 0.5, py + 0.5);
          auto edge = [&](int a, int b) {
            return ((s[b] - s[a]).x() * (q - s[a]).y() - (s[b] - s[a]).y() * (q - s[a]).x()) / area;
          };
          const double w0 = edge(1, 2);
          const double w1 = edge(2, 0);
          const double w2 = edge(0, 1);
          if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
          const double inv_z = w0 / c[0].z() + w1 / c[1].z() + w2 / c[2].z();
          const double z = 1.0 / inv_z;
          const std::size_t idx = static_cast<std::size_t>(py) * cam.width + px;
          if (z < img.depth[idx]) {
            img.depth[idx] = z;
            img.foreground[idx] = prim.foreground ? 1 : 0;
            r.normal[idx] = n;
          }
        }
      }
    }
  }

  if (const auto& plane = scene.plane()) {
    const Vec3 n_cam = world_to_cam.linear() * plane->normal;
    const Vec3 p_cam = world_to_cam * plane->point;
    Vec3 n_world = plane->normal;
    if (n_world.dot(eye - plane->point) < 0.0) n_world = -n_world;
    for (int py = 0; py < cam.height; ++py) {
      for (int px = 0; px < cam.width; ++px) {
        const Vec3 d((px + 0.5 - cam.cx) / cam.fx, (py + 0.5 - cam.cy) / cam.fy, 1.0);
        const double denom = n_cam.dot(d);
        if (std::abs(denom) < 1e-300) continue;
        const double z = n_cam.dot(p_cam) / denom;
        if (z < cam.near) continue;
        const std::size_t idx = static_cast<std::size_t>(py) * cam.width + px;
        if (z < img.depth[idx]) {
          img.depth[idx] = z;
          img.foreground[idx] = plane->foreground ? 1 : 0;
          r.normal[idx] = n_world;
        }
      }
    }
  }
  return r;
}

}  // namespace

DepthImage render_depth(const Scene& scene, const Camera& camera) {
  return rasterize(scene, camera).image;
}

PointCloud partial_view_cull(const Scene& scene, const Camera& camera) {
  const Raster r = rasterize(scene, camera);
  PointCloud cloud;
  for (int py = 0; py < camera.height; ++py) {
    for (int px = 0; px < camera.width; ++px) {
      const std::size_t idx = static_cast<std::size_t>(py) * camera.width + px;
      const double z = r.image.depth[idx];
      if (!std::isfinite(z)) continue;
      const Vec3 pc((px + 0.5 - camera.cx) / camera.fx * z, (py + 0.5 - camera.cy) / camera.fy * z, z);
      cloud.points.push_back(camera.pose * pc);
      cloud.foreground.push_back(r.image.foreground[idx]);
      cloud.normals.push_back(r.normal[idx]);
    }
  }
  return cloud;
}

Camera camera_from_json(const nlohmann::json& j) {
  Camera c;
  c.fx = j.value("fx", c.fx);
  c.fy = j.value("fy", c.fy);
  c.cx = j.value("cx", c.cx);
  c.cy = j.value("cy", c.cy);
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.near = j.value("near", c.near);
  if (c.width <= 0 || c.height <= 0 || c.fx <= 0.0 || c.fy <= 0.0)
    throw std::invalid_argument("camera intrinsics must be positive");
  if (j.contains("pose")) {
    c.pose = transform_from_json(j.at("pose"));
  } else if (j.contains("eye")) {
    const Vec3 up = j.contains("up") ? vec3_from_json(j.at("up")) : Vec3::UnitZ();
    c.pose = Camera::look_at(vec3_from_json(j.at("eye")), vec3_from_json(j.value("target", nlohmann::json::array({0, 0, 0}))), up);
  }
  return c;
}

Camera load_camera(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open camera: " + path.string());
  return camera_from_json(nlohmann::json::parse(in));
}

}  // namespace dexgrasp::geom
