#include "dexgrasp/model/kinematics.hpp"

#include <cmath>

namespace dexgrasp::model {

geom::Mat3 rotation_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-15) return geom::Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Vec3 rotation_log(const geom::Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.axis() * aa.angle();
}

Transform BasePose::transform() const {
  Transform t = Transform::Identity();
  t.linear() = rotation_exp(rotation);
  t.translation() = translation;
  return t;
}

BasePose BasePose::from_transform(const Transform& t) {
  return {t.translation(), rotation_log(t.linear())};
}

BasePose BasePose::canonical() const { return {translation, rotation_log(rotation_exp(rotation))}; }

BasePose BasePose::stepped(const Vec3& d_translation, const Vec3& d_rotation) const {
  return {translation + d_translation, rotation_log(rotation_exp(d_rotation) * rotation_exp(rotation))};
}

bool ClampResult::any() const {
  for (bool c : clamped) {
    if (c) return true;
  }
  return false;
}

ClampResult clamp_joints(const GripperModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dof()) throw std::invalid_argument("joint vector has wrong length");
  ClampResult out;
  out.q = q.cwiseMax(model.lower()).cwiseMin(model.upper());
  out.clamped.resize(q.size());
  for (int i = 0; i < q.size(); ++i) out.clamped[i] = out.q[i] != q[i];
  return out;
}

LinkFrames link_frames(const GripperModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dof()) throw std::invalid_argument("joint vector has wrong length");
  const auto& links = model.links();
  const auto& joints = model.joints();
  LinkFrames f;
  f.link.assign(links.size(), Transform::Identity());
  f.joint_axis.assign(joints.size(), Vec3::Zero());
  f.joint_origin.assign(joints.size(), Vec3::Zero());
  for (int l : model.link_order()) {
    const int ji = links[l].parent_joint;
    if (ji < 0) continue;
    const Joint& j = joints[ji];
    const Transform& parent = f.link[j.parent_link];
    const double qj = j.dof >= 0 ? q[j.dof] : 0.0;
    Transform local = Transform::Identity();
    switch (j.type) {
      case JointType::Revolute:
        local.translation() = j.origin.translation();
        local.linear() = Eigen::AngleAxisd(qj, j.axis).toRotationMatrix() * j.origin.linear();
        break;
      case JointType::Prismatic:
        local.translation() = j.origin.translation() + j.axis * qj;
        local.linear() = j.origin.linear();
        break;
      case JointType::Fixed:
        local = j.origin;
        break;
    }
    f.link[l] = parent * local;
    f.joint_axis[ji] = parent.linear() * j.axis;
    f.joint_origin[ji] = parent * j.origin.translation();
  }
  return f;
}

std::vector<Transform> forward_kinematics(const GripperModel& model, const Eigen::VectorXd& q,
                                          const BasePose& base) {
  auto frames = link_frames(model, q).link;
  const Transform b = base.transform();
  for (auto& t : frames) t = b * t;
  return frames;
}

Vec3 point_velocity(const GripperModel& model, const LinkFrames& frames, int dof, int link, const Vec3& p) {
  if (!model.moves(dof, link)) return Vec3::Zero();
  const int ji = model.dof_joint(dof);
  const Vec3& axis = frames.joint_axis[ji];
  if (model.joints()[ji].type == JointType::Prismatic) return axis;
  return axis.cross(p - frames.joint_origin[ji]);
}

Eigen::VectorXd KeypointState::flat() const {
  Eigen::VectorXd v(6 * (finger_count() + 1));
  v.segment<3>(0) = rotation;
  v.segment<3>(3) = root;
  for (int k = 0; k < finger_count(); ++k) {
    v.segment<3>(6 + 6 * k) = fingers[k][0];
    v.segment<3>(9 + 6 * k) = fingers[k][1];
  }
  return v;
}

Eigen::VectorXd KeypointState::finger_positions() const {
  Eigen::VectorXd v(6 * finger_count());
  for (int k = 0; k < finger_count(); ++k) {
    v.segment<3>(6 * k) = fingers[k][0];
    v.segment<3>(6 * k + 3) = fingers[k][1];
  }
  return v;
}

Eigen::VectorXd finger_keypoints(const GripperModel& model, const LinkFrames& frames) {
  const int k_count = model.finger_count();
  Eigen::VectorXd v(6 * k_count);
  for (int k = 0; k < k_count; ++k) {
    const Finger& f = model.fingers()[k];
    v.segment<3>(6 * k) = frames.link[f.middle.link] * f.middle.offset;
    v.segment<3>(6 * k + 3) = frames.link[f.tip.link] * f.tip.offset;
  }
  return v;
}

Eigen::VectorXd finger_keypoints(const GripperModel& model, const Eigen::VectorXd& q) {
  return finger_keypoints(model, link_frames(model, q));
}

KeypointState keypoint_state(const GripperModel& model, const Eigen::VectorXd& q, const BasePose& base) {
  const LinkFrames frames = link_frames(model, q);
  KeypointState s;
  s.rotation = base.canonical().rotation;
  s.root = frames.link[model.root_keypoint().link] * model.root_keypoint().offset;
  const Eigen::VectorXd kp = finger_keypoints(model, frames);
  s.fingers.resize(model.finger_count());
  for (int k = 0; k < model.finger_count(); ++k) {
    s.fingers[k][0] = kp.segment<3>(6 * k);
    s.fingers[k][1] = kp.segment<3>(6 * k + 3);
  }
  return s;
}

Eigen::MatrixXd keypoint_jacobian(const GripperModel& model, const LinkFrames& frames) {
  const int k_count = model.finger_count();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6 * k_count, model.dof());
  for (int k = 0; k < k_count; ++k) {
    const Finger& f = model.fingers()[k];
    const Vec3 pm = frames.link[f.middle.link] * f.middle.offset;
    const Vec3 pt = frames.link[f.tip.link] * f.tip.offset;
    for (int d = 0; d < model.dof(); ++d) {
      jac.block<3, 1>(6 * k, d) = point_velocity(model, frames, d, f.middle.link, pm);
      jac.block<3, 1>(6 * k + 3, d) = point_velocity(model, frames, d, f.tip.link, pt);
    }
  }
  return jac;
}

Eigen::MatrixXd keypoint_jacobian(const GripperModel& model, const Eigen::VectorXd& q) {
  return keypoint_jacobian(model, link_frames(model, q));
}

}  // namespace dexgrasp::model
