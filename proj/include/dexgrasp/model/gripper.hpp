#pragma once

#include "dexgrasp/geom/bvh.hpp"
#include "dexgrasp/geom/convex_hull.hpp"
#include "dexgrasp/geom/mesh.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace dexgrasp::model {

using geom::Transform;
using geom::Vec3;

enum class JointType { Revolute, Prismatic, Fixed };

/// Raised when a gripper description violates its schema or invariants.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Declarative description, as written in a gripper spec file.

struct LinkSpec {
  std::string name;
  geom::Mesh mesh;  // link-local frame, meters
};

struct JointSpec {
  std::string name;
  JointType type = JointType::Revolute;
  std::string parent;
  std::string child;
  Transform origin = Transform::Identity();  // child frame at q = 0, in the parent link frame
  Vec3 axis = Vec3::UnitZ();                 // parent link frame, through origin.translation()
  double lower = 0.0;
  double upper = 0.0;
  bool actuated = true;
};

struct KeypointSpec {
  std::string link;
  Vec3 offset = Vec3::Zero();
};

struct FingerSpec {
  std::string name;
  std::vector<std::string> links;  // palm outward
  KeypointSpec middle;             // middle-phalanx point
  KeypointSpec tip;                // fingertip point
};

struct GripperSpec {
  std::string name;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::vector<FingerSpec> fingers;  // index 0 is the thumb
  KeypointSpec root;
  Transform palm_frame = Transform::Identity();
  Vec3 d_up = Vec3::UnitZ();
};

// ---------------------------------------------------------------------------
// Resolved model.

struct Link {
  std::string name;
  int parent_joint = -1;  // -1 for the base link
  int parent_link = -1;
  int component = 0;  // 0 = palm, k + 1 = finger k
  geom::Mesh mesh;
  geom::ConvexHull hull;  // empty for links without geometry
  geom::Bvh bvh;
};

struct Joint {
  std::string name;
  JointType type = JointType::Revolute;
  int parent_link = -1;
  int child_link = -1;
  Transform origin = Transform::Identity();
  Vec3 axis = Vec3::UnitZ();
  double lower = 0.0;
  double upper = 0.0;
  bool actuated = true;
  int dof = -1;  // index into the joint vector, -1 when not actuated
};

struct Keypoint {
  int link = 0;
  Vec3 offset = Vec3::Zero();
};

struct Finger {
  std::string name;
  std::vector<int> links;
  Keypoint middle;
  Keypoint tip;
};

/// Immutable kinematic tree of a gripper with per-link geometry, finger
/// chains and semantic keypoint attachments.
class GripperModel {
 public:
  /// Validates and resolves a spec. Throws SpecError.
  static GripperModel from_spec(const GripperSpec& spec);

  const std::string& name() const { return name_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<Finger>& fingers() const { return fingers_; }
  const Keypoint& root_keypoint() const { return root_; }
  const Transform& palm_frame() const { return palm_frame_; }
  const Vec3& d_up() const { return d_up_; }

  int base_link() const { return base_link_; }
  /// Links sorted parent-before-child.
  const std::vector<int>& link_order() const { return order_; }
  int dof() const { return static_cast<int>(dof_joints_.size()); }
  int finger_count() const { return static_cast<int>(fingers_.size()); }
  int component_count() const { return finger_count() + 1; }
  /// Length of the keypoint state vector, 6(K + 1).
  int keypoint_state_dim() const { return 6 * component_count(); }
  /// Joint index driving actuated coordinate `dof`.
  int dof_joint(int dof) const { return dof_joints_[dof]; }

  /// True when actuated coordinate `dof` moves link `link`.
  bool moves(int dof, int link) const { return moves_[link][dof]; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  /// Zero clamped into the limits.
  const Eigen::VectorXd& rest() const { return rest_; }

  /// Link transforms in the base frame at the rest configuration.
  const std::vector<Transform>& rest_frames() const { return rest_frames_; }

  int link_index(const std::string& name) const;
  int joint_index(const std::string& name) const;

  /// True when links a and b are joined directly (parent/child).
  bool adjacent(int a, int b) const;

 private:
  std::string name_;
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::vector<Finger> fingers_;
  Keypoint root_;
  Transform palm_frame_ = Transform::Identity();
  Vec3 d_up_ = Vec3::UnitZ();
  int base_link_ = 0;
  std::vector<int> order_;
  std::vector<int> dof_joints_;
  std::vector<std::vector<bool>> moves_;
  Eigen::VectorXd lower_, upper_, rest_;
  std::vector<Transform> rest_frames_;
};

}  // namespace dexgrasp::model
