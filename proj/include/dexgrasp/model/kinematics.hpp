#pragma once

#include "dexgrasp/model/gripper.hpp"

#include <array>
#include <vector>

namespace dexgrasp::model {

/// World placement of the gripper base: translation plus axis-angle rotation.
struct BasePose {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  // axis * angle, radians

  Transform transform() const;
  static BasePose from_transform(const Transform& t);
  /// Same rotation with angle wrapped into [0, pi].
  BasePose canonical() const;
  /// Applies a world-frame translation delta and a left-multiplied rotation delta.
  BasePose stepped(const Vec3& d_translation, const Vec3& d_rotation) const;
};

/// Axis-angle vector of a rotation matrix with angle in [0, pi].
Vec3 rotation_log(const geom::Mat3& r);
geom::Mat3 rotation_exp(const Vec3& w);

struct ClampResult {
  Eigen::VectorXd q;
  std::vector<bool> clamped;
  bool any() const;
};

/// Clamps each coordinate into its joint limits and reports which moved.
ClampResult clamp_joints(const GripperModel& model, const Eigen::VectorXd& q);

/// Per-link transforms together with each joint's axis and pivot, all in one frame.
struct LinkFrames {
  std::vector<Transform> link;
  std::vector<Vec3> joint_axis;
  std::vector<Vec3> joint_origin;
};

/// Forward kinematics in the gripper base frame.
LinkFrames link_frames(const GripperModel& model, const Eigen::VectorXd& q);

/// World-frame link transforms under `base`.
std::vector<Transform> forward_kinematics(const GripperModel& model, const Eigen::VectorXd& q,
                                          const BasePose& base);

/// Velocity of base-frame point `p` rigidly attached to `link` per unit motion
/// of actuated coordinate `dof` (zero when the coordinate does not move the link).
Vec3 point_velocity(const GripperModel& model, const LinkFrames& frames, int dof, int link,
                    const Vec3& p);

/// Semantic keypoint state: rotation r, root p_0 and two points per finger,
/// positions in the gripper-local (base) frame.
struct KeypointState {
  Vec3 rotation = Vec3::Zero();
  Vec3 root = Vec3::Zero();
  std::vector<std::array<Vec3, 2>> fingers;  // [middle, tip]

  int finger_count() const { return static_cast<int>(fingers.size()); }
  /// [r, p_0, p_1^0, p_1^1, ...], length 6(K + 1).
  Eigen::VectorXd flat() const;
  /// Finger keypoints only, length 6K.
  Eigen::VectorXd finger_positions() const;
};

KeypointState keypoint_state(const GripperModel& model, const Eigen::VectorXd& q, const BasePose& base);

/// Stacked finger keypoint positions (6K) in the base frame.
Eigen::VectorXd finger_keypoints(const GripperModel& model, const Eigen::VectorXd& q);
Eigen::VectorXd finger_keypoints(const GripperModel& model, const LinkFrames& frames);

/// d(finger keypoints) / dq, 6K x C.
Eigen::MatrixXd keypoint_jacobian(const GripperModel& model, const Eigen::VectorXd& q);
Eigen::MatrixXd keypoint_jacobian(const GripperModel& model, const LinkFrames& frames);

}  // namespace dexgrasp::model
