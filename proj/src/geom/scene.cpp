#include "dexgrasp/geom/scene.hpp"

#include "dexgrasp/geom/ply.hpp"
#include "dexgrasp/geom/pose_json.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace dexgrasp::geom {

void Scene::add_mesh(const Mesh& local, const Transform& pose, bool foreground, std::string name) {
  primitives_.push_back({local.transformed(pose), foreground, std::move(name)});
  built_ = false;
}

void Scene::set_table(double height, bool foreground) {
  set_plane(Vec3(0, 0, height), Vec3::UnitZ(), foreground);
}

void Scene::set_plane(const Vec3& point, const Vec3& normal, bool foreground) {
  plane_ = Plane{point, normal.normalized(), foreground};
}

void Scene::set_cloud(PointCloud cloud, const Vec3& viewpoint, int normal_k) {
  if (cloud.foreground.size() != cloud.points.size())
    throw std::invalid_argument("cloud flags and points differ in length");
  cloud_ = std::move(cloud);
  viewpoint_ = viewpoint;
  normal_k_ = normal_k;
  built_ = false;
}

void Scene::build() {
  Mesh merged;
  tri_foreground_.clear();
  for (const auto& prim : primitives_) {
    merged.append(prim.mesh);
    tri_foreground_.insert(tri_foreground_.end(), prim.mesh.triangles.size(),
                           prim.foreground ? 1 : 0);
  }
  bvh_ = Bvh(merged);
  cloud_index_ = PointIndex(cloud_.points);
  if (!cloud_.empty() && cloud_.normals.size() != cloud_.points.size()) {
    cloud_.normals = estimate_normals(cloud_index_, normal_k_, viewpoint_);
  }
  built_ = true;
}

bool Scene::empty() const { return primitives_.empty() && !plane_ && cloud_.empty(); }

bool Scene::has_foreground() const {
  for (const auto& p : primitives_) {
    if (p.foreground) return true;
  }
  if (plane_ && plane_->foreground) return true;
  for (auto f : cloud_.foreground) {
    if (f) return true;
  }
  return false;
}

ClosestHit Scene::closest(const Vec3& p) const {
  if (!built_) throw std::logic_error("Scene::build() must be called before queries");
  ClosestHit best;
  if (!bvh_.empty()) {
    best = bvh_.closest(p);
    if (best.primitive >= 0) best.source = tri_foreground_[best.primitive];
  }
  if (plane_) {
    const double s = plane_->normal.dot(p - plane_->point);
    const double d = std::abs(s);
    if (d < best.distance) {
      best.distance = d;
      best.point = p - s * plane_->normal;
      best.normal = plane_->normal;
      best.source = plane_->foreground ? 1 : 0;
      best.primitive = -1;
    }
  }
  if (!cloud_index_.empty()) {
    double d = 0.0;
    const int i = cloud_index_.nearest(p, &d);
    if (d < best.distance) {
      best.distance = d;
      best.point = cloud_.points[i];
      best.normal = cloud_.normals[i];
      best.source = cloud_.foreground[i];
      best.primitive = i;
    }
  }
  return best;
}

Mesh Scene::foreground_mesh() const {
  Mesh m;
  for (const auto& p : primitives_) {
    if (p.foreground) m.append(p.mesh);
  }
  return m;
}

Mesh Scene::all_meshes() const {
  Mesh m;
  for (const auto& p : primitives_) m.append(p.mesh);
  return m;
}

Vec3 Scene::object_center() const {
  Aabb box;
  for (const auto& p : primitives_) {
    if (p.foreground) box.extend(p.mesh.bounds());
  }
  for (std::size_t i = 0; i < cloud_.size(); ++i) {
    if (cloud_.foreground[i]) box.extend(cloud_.points[i]);
  }
  return box.empty() ? Vec3::Zero() : box.center();
}

double Scene::object_radius() const {
  const Vec3 c = object_center();
  double r = 0.0;
  for (const auto& p : primitives_) {
    if (!p.foreground) continue;
    for (const auto& v : p.mesh.vertices) r = std::max(r, (v - c).norm());
  }
  for (std::size_t i = 0; i < cloud_.size(); ++i) {
    if (cloud_.foreground[i]) r = std::max(r, (cloud_.points[i] - c).norm());
  }
  return r;
}

Scene Scene::transformed(const Transform& t) const {
  Scene out;
  for (const auto& p : primitives_) out.primitives_.push_back({p.mesh.transformed(t), p.foreground, p.name});
  if (plane_) out.plane_ = Plane{t * plane_->point, t.linear() * plane_->normal, plane_->foreground};
  out.cloud_ = cloud_;
  for (auto& p : out.cloud_.points) p = t * p;
  for (auto& n : out.cloud_.normals) n = t.linear() * n;
  out.viewpoint_ = t * viewpoint_;
  out.normal_k_ = normal_k_;
  out.build();
  return out;
}

namespace {

Mesh primitive_mesh(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "sphere") return Mesh::icosphere(j.at("radius").get<double>(), j.value("subdivisions", 3));
  if (type == "box") return Mesh::box(vec3_from_json(j.at("extents")));
  if (type == "pyramid") return Mesh::pyramid(j.at("base").get<double>(), j.at("height").get<double>());
  throw std::invalid_argument("unknown primitive type: " + type);
}

}  // namespace

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("scene parse error: " + std::string(e.what()));
  }
  const auto dir = path.parent_path();
  Scene scene;
  for (const auto& obj : doc.value("objects", nlohmann::json::array())) {
    Mesh mesh;
    if (obj.contains("mesh")) {
      mesh = load_obj(dir / obj.at("mesh").get<std::string>());
      if (obj.value("units", std::string("m")) == "mm") mesh = mesh.scaled(Vec3::Constant(1e-3));
    } else if (obj.contains("primitive")) {
      mesh = primitive_mesh(obj.at("primitive"));
    } else {
      throw std::invalid_argument("scene object needs 'mesh' or 'primitive'");
    }
    if (obj.contains("scale")) mesh = mesh.scaled(vec3_from_json(obj.at("scale")));
    scene.add_mesh(mesh, transform_from_json(obj.value("pose", nlohmann::json())),
                   obj.value("foreground", true), obj.value("name", std::string()));
  }
  if (doc.contains("table")) {
    scene.set_table(doc.at("table").value("height", 0.0), doc.at("table").value("foreground", false));
  }
  if (doc.contains("cloud")) {
    const Vec3 vp = doc.contains("viewpoint") ? vec3_from_json(doc.at("viewpoint")) : Vec3::Zero();
    scene.set_cloud(read_cloud_ply(dir / doc.at("cloud").get<std::string>()), vp);
  }
  if (scene.empty()) throw std::invalid_argument("scene is empty");
  scene.build();
  return scene;
}

}  // namespace dexgrasp::geom
