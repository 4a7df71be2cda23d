#include "dexgrasp/metrics/metrics.hpp"

#include "dexgrasp/geom/gripper_queries.hpp"

#include <limits>

namespace dexgrasp::metrics {

ContactDetector::ContactDetector(const geom::Scene& scene) : object_(scene.foreground_mesh()) {
  if (!object_.empty()) bvh_ = geom::Bvh(object_);
  const auto& cloud = scene.cloud();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.foreground[i]) continue;
    cloud_points_.push_back(cloud.points[i]);
    cloud_normals_.push_back(cloud.normals.size() == cloud.size() ? cloud.normals[i] : Vec3::UnitZ());
  }
}

std::vector<Contact> ContactDetector::detect(const model::GripperModel& model, const Eigen::VectorXd& q,
                                             const model::BasePose& base, double delta) const {
  const geom::PosedGripper gripper(model, q, base);
  std::vector<Contact> out;
  const double bound0 = delta + 1e-12;
  for (int l = 0; l < static_cast<int>(model.links().size()); ++l) {
    const auto& link = model.links()[l];
    if (link.mesh.empty()) continue;
    Contact best;
    best.distance = std::numeric_limits<double>::infinity();
    if (!bvh_.empty()) {
      const geom::Transform& tf = gripper.frames()[l];
      int prim = -1;
      for (int t = 0; t < static_cast<int>(link.mesh.size()); ++t) {
        const auto pair = bvh_.closest_to_triangle(tf * link.mesh.vertex(t, 0), tf * link.mesh.vertex(t, 1),
                                                   tf * link.mesh.vertex(t, 2), std::min(best.distance, bound0));
        if (pair.primitive < 0 || pair.distance >= best.distance) continue;
        best.distance = pair.distance;
        best.point = pair.on_mesh;
        best.gripper_point = pair.on_query;
        prim = pair.primitive;
      }
      if (prim >= 0) {
        const Vec3 gap = best.gripper_point - best.point;
        best.normal = best.distance > 1e-12 ? Vec3(gap / gap.norm()) : bvh_.normal(prim);
      }
    }
    for (std::size_t i = 0; i < cloud_points_.size(); ++i) {
      const geom::ClosestHit hit = gripper.closest_on_link(l, cloud_points_[i]);
      if (!hit.valid() || hit.distance >= best.distance || hit.distance > bound0) continue;
      best.distance = hit.distance;
      best.point = cloud_points_[i];
      best.gripper_point = hit.point;
      best.normal = cloud_normals_[i];
    }
    if (best.distance > delta) continue;
    best.link = l;
    best.component = link.component;
    out.push_back(best);
  }
  return out;
}

std::vector<Contact> detect_contacts(const model::GripperModel& model, const Eigen::VectorXd& q,
                                     const model::BasePose& base, const geom::Scene& scene, double delta) {
  return ContactDetector(scene).detect(model, q, base, delta);
}

int finger_contact_count(const std::vector<Contact>& contacts) {
  int n = 0;
  for (const auto& c : contacts) n += c.component > 0;
  return n;
}

CollisionStats collision_stats(const std::vector<Eigen::VectorXd>& configurations, const model::GripperModel& model,
                               const adapt::CollisionContext& ctx) {
  CollisionStats s;
  s.frames = static_cast<int>(configurations.size());
  double total = 0.0;
  for (const auto& q : configurations) {
    const double loss = adapt::self_collision_loss(model, ctx, q).value;
    if (loss > 0.0) {
      ++s.colliding;
      total += loss;
    }
  }
  if (s.frames > 0) s.percentage = 100.0 * s.colliding / s.frames;
  if (s.colliding > 0) s.mean_loss_colliding = total / s.colliding;
  return s;
}

}  // namespace dexgrasp::metrics
