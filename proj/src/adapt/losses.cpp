#include "dexgrasp/adapt/losses.hpp"

#include "dexgrasp/geom/gripper_queries.hpp"

#include <algorithm>

namespace dexgrasp::adapt {

CollisionContext CollisionContext::build(const model::GripperModel& model, int points_per_link, std::uint64_t seed) {
  CollisionContext ctx;
  ctx.samples = geom::sample_link_surface(model, points_per_link, seed);
  const int n = static_cast<int>(model.links().size());
  ctx.hull_radius.assign(n, 0.0);
  for (int l = 0; l < n; ++l) {
    const auto& hull = model.links()[l].hull;
    for (const Vec3& v : hull.vertices) ctx.hull_radius[l] = std::max(ctx.hull_radius[l], (v - hull.centroid).norm());
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b || ctx.samples[a].empty() || model.links()[b].hull.empty()) continue;
      if (model.adjacent(a, b)) continue;
      ctx.pairs.emplace_back(a, b);
    }
  return ctx;
}

bool CollisionContext::excluded(int a, int b) const {
  return std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) == pairs.end();
}

namespace {

// Self-collision loss evaluated on prepared link frames.
LossValue self_collision(const model::GripperModel& model, const CollisionContext& ctx, const model::LinkFrames& frames) {
  const int dof = model.dof();
  LossValue out{0.0, Eigen::VectorXd::Zero(dof)};
  std::vector<geom::Transform> inverse;
  inverse.reserve(frames.link.size());
  for (const auto& t : frames.link) inverse.push_back(t.inverse());

  for (const auto& [m, n] : ctx.pairs) {
    const auto& hull = model.links()[n].hull;
    const double radius = ctx.hull_radius[n];
    const geom::Transform to_n = inverse[n] * frames.link[m];
    for (const Vec3& s : ctx.samples[m]) {
      const Vec3 local = to_n * s;
      if ((local - hull.centroid).squaredNorm() > radius * radius) continue;
      int face = -1;
      const double depth = geom::signed_distance_hull(hull, local, face);
      if (depth <= 0.0) continue;
      out.value += depth;
      // d(depth)/dq = -n' . (v_m(x) - v_n(x)) with n' the face normal in the base frame
      const Vec3 x = frames.link[m] * s;
      const Vec3 normal = frames.link[n].linear() * hull.faces[face].normal;
      for (int d = 0; d < dof; ++d) {
        const Vec3 rel = model::point_velocity(model, frames, d, m, x) - model::point_velocity(model, frames, d, n, x);
        out.grad[d] -= normal.dot(rel);
      }
    }
  }
  return out;
}

}  // namespace

LossValue cycle_point_loss(const model::GripperModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& dj,
                           const Eigen::VectorXd& dp) {
  const model::ClampResult target = model::clamp_joints(model, q + dj);
  const model::LinkFrames frames = model::link_frames(model, target.q);
  const Eigen::VectorXd residual = model::finger_keypoints(model, frames) - model::finger_keypoints(model, q) - dp;
  LossValue out;
  out.value = 0.5 * residual.squaredNorm();
  out.grad = model::keypoint_jacobian(model, frames).transpose() * residual;
  for (int d = 0; d < model.dof(); ++d)
    if (target.clamped[d]) out.grad[d] = 0.0;
  return out;
}

LossValue self_collision_loss(const model::GripperModel& model, const CollisionContext& ctx, const Eigen::VectorXd& q) {
  return self_collision(model, ctx, model::link_frames(model, q));
}

LossValue total_adaptation_loss(const model::GripperModel& model, const CollisionContext& ctx,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& dj, const Eigen::VectorXd& dp,
                                double omega) {
  const model::ClampResult target = model::clamp_joints(model, q + dj);
  LossValue point = cycle_point_loss(model, q, dj, dp);
  LossValue self = self_collision_loss(model, ctx, target.q);
  for (int d = 0; d < model.dof(); ++d)
    if (target.clamped[d]) self.grad[d] = 0.0;
  point.value += omega * self.value;
  point.grad += omega * self.grad;
  return point;
}

}  // namespace dexgrasp::adapt
