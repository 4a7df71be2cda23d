#include "dexgrasp/geom/gripper_queries.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dexgrasp::geom {

PosedGripper::PosedGripper(const model::GripperModel& model, const Eigen::VectorXd& q,
                           const model::BasePose& base)
    : model_(&model), base_(base), frames_(model::forward_kinematics(model, q, base)) {
  inverse_.reserve(frames_.size());
  for (const auto& f : frames_) inverse_.push_back(f.inverse());
}

ClosestHit PosedGripper::closest_on_link(int link, const Vec3& p) const {
  const auto& bvh = model_->links()[link].bvh;
  ClosestHit hit = bvh.closest(inverse_[link] * p);
  if (hit.primitive < 0) return hit;
  hit.point = frames_[link] * hit.point;
  hit.normal = frames_[link].linear() * hit.normal;
  hit.source = link;
  return hit;
}

ClosestHit PosedGripper::closest(const Vec3& p) const {
  ClosestHit best;
  for (int l = 0; l < static_cast<int>(frames_.size()); ++l) {
    const auto& bvh = model_->links()[l].bvh;
    if (bvh.empty()) continue;
    ClosestHit hit = bvh.closest(inverse_[l] * p, best.distance * (1.0 + kTieSlack));
    if (hit.primitive < 0) continue;
    if (hit.distance * (1.0 + kTieSlack) < best.distance) {
      best = hit;
      best.point = frames_[l] * hit.point;
      best.normal = frames_[l].linear() * hit.normal;
      best.source = l;
    }
  }
  return best;
}

Transform PosedGripper::palm() const { return frames_[model_->base_link()] * model_->palm_frame(); }

Mesh PosedGripper::link_mesh(int link) const { return model_->links()[link].mesh.transformed(frames_[link]); }

ClosestHit closest_point_gripper(const model::GripperModel& model, const Eigen::VectorXd& q,
                                 const model::BasePose& base, const Vec3& p) {
  return PosedGripper(model, q, base).closest(p);
}

std::vector<Vec3> sample_surface(const Mesh& mesh, int count, std::mt19937_64& rng, std::vector<int>* triangles) {
  std::vector<Vec3> out;
  if (mesh.empty() || count <= 0) return out;
  std::vector<double> cdf(mesh.size());
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.size()); ++t) {
    total += mesh.face_area(t);
    cdf[t] = total;
  }
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double r = uni(rng) * total;
    const int t = std::min<int>(static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin()),
                                static_cast<int>(mesh.size()) - 1);
    const double s = std::sqrt(uni(rng));
    const double u = uni(rng);
    out.push_back((1.0 - s) * mesh.vertex(t, 0) + s * (1.0 - u) * mesh.vertex(t, 1) + s * u * mesh.vertex(t, 2));
    if (triangles) triangles->push_back(t);
  }
  return out;
}

std::vector<std::vector<Vec3>> sample_link_surface(const model::GripperModel& model, int points_per_link,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Vec3>> out;
  out.reserve(model.links().size());
  for (const auto& link : model.links()) out.push_back(sample_surface(link.mesh, points_per_link, rng));
  return out;
}

namespace {

Mat3 frame_from(const Vec3& primary, const Vec3& secondary) {
  Mat3 f;
  f.col(0) = primary.normalized();
  f.col(1) = (secondary - secondary.dot(f.col(0)) * f.col(0)).normalized();
  f.col(2) = f.col(0).cross(f.col(1));
  return f;
}

Vec3 any_perpendicular(const Vec3& a) {
  const Vec3 trial = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (trial - trial.dot(a) * a).normalized();
}

}  // namespace

std::vector<model::BasePose> sample_initial_poses(const Vec3& center, int count, std::uint64_t seed,
                                                  const Vec3& palm_normal, const Vec3& thumb, double radius) {
  std::vector<model::BasePose> poses;
  if (count <= 0) return poses;
  const Vec3 a = palm_normal.normalized();
  Vec3 b = thumb - thumb.dot(a) * a;
  b = b.norm() > 1e-9 ? Vec3(b.normalized()) : any_perpendicular(a);
  const Mat3 local = frame_from(a, b);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  poses.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double z = uni(rng);
    const double phi = 2.0 * std::numbers::pi * uni(rng);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 dir(rho * std::cos(phi), rho * std::sin(phi), z);
    const Vec3 pos = center + radius * dir;
    const Vec3 toward = -dir;
    Vec3 up = Vec3::UnitZ() - Vec3::UnitZ().dot(toward) * toward;
    if (up.norm() < 1e-9) up = Vec3::UnitX() - Vec3::UnitX().dot(toward) * toward;
    const Mat3 world = frame_from(toward, up);
    Transform t = Transform::Identity();
    t.linear() = world * local.transpose();
    t.translation() = pos;
    poses.push_back(model::BasePose::from_transform(t));
  }
  return poses;
}

std::vector<model::BasePose> sample_initial_poses(const model::GripperModel& model, const Vec3& center,
                                                  int count, std::uint64_t seed, double radius) {
  const auto& thumb = model.fingers().front();
  const Vec3 tip = model.rest_frames()[thumb.tip.link] * thumb.tip.offset;
  const Vec3 root = model.rest_frames()[model.root_keypoint().link] * model.root_keypoint().offset;
  return sample_initial_poses(center, count, seed, model.d_up(), tip - root, radius);
}

}  // namespace dexgrasp::geom
