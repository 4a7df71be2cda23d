#pragma once

#include "dexgrasp/adapt/losses.hpp"
#include "dexgrasp/geom/bvh.hpp"
#include "dexgrasp/geom/scene.hpp"
#include "dexgrasp/model/kinematics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dexgrasp::metrics {

using geom::Transform;
using geom::Vec3;

struct Contact {
  Vec3 point = Vec3::Zero();       // on the object, world frame
  Vec3 normal = Vec3::UnitZ();     // unit, out of the object
  Vec3 gripper_point = Vec3::Zero();
  int link = -1;
  int component = 0;               // 0 = palm, k + 1 = finger k
  double distance = 0.0;           // gap; zero when touching or intersecting
};

/// Nearest-pair contact queries against the foreground of one scene.
class ContactDetector {
 public:
  explicit ContactDetector(const geom::Scene& scene);

  /// One contact per link whose distance to the foreground is at most `delta`.
  std::vector<Contact> detect(const model::GripperModel& model, const Eigen::VectorXd& q, const model::BasePose& base,
                              double delta = 0.002) const;

 private:
  geom::Mesh object_;
  geom::Bvh bvh_;
  std::vector<Vec3> cloud_points_;
  std::vector<Vec3> cloud_normals_;
};

std::vector<Contact> detect_contacts(const model::GripperModel& model, const Eigen::VectorXd& q,
                                     const model::BasePose& base, const geom::Scene& scene, double delta = 0.002);

/// Contacts on finger links (component > 0).
int finger_contact_count(const std::vector<Contact>& contacts);

struct Q1Params {
  double mu = 0.5;
  int cone_edges = 8;
  /// Torsional friction per unit normal force, in normalised torque units.
  double torsion = 0.1;
};

/// Unit contact wrenches (force; torque / rho) in the object frame: each
/// friction-cone edge paired with both signs of the torsional term.
std::vector<Eigen::VectorXd> contact_wrenches(const std::vector<Contact>& contacts, const Transform& object_frame,
                                              double rho, const Q1Params& params);

/// Half-space description of a full-dimensional convex hull in R^d.
struct HullNd {
  std::vector<Eigen::VectorXd> normals;  // unit, outward
  std::vector<double> offsets;           // normal . x <= offset inside
  bool full_dimensional = false;
};

/// Incremental (beneath-beyond) convex hull in any dimension.
HullNd convex_hull_nd(const std::vector<Eigen::VectorXd>& points, double eps = 1e-12);

/// Radius of the largest origin-centred ball inside the hull, or zero when
/// the origin is not strictly inside.
double origin_depth(const HullNd& hull, double eps = 1e-12);

/// Largest origin-centred ball in the contact wrench hull; zero for fewer
/// than two contacts or a grasp that is not force closed.
double q1(const std::vector<Contact>& contacts, const Transform& object_frame, double rho, const Q1Params& params = {});

struct CollisionStats {
  int frames = 0;
  int colliding = 0;
  double percentage = 0.0;          // of frames with positive self-collision loss
  double mean_loss_colliding = 0.0;  // over colliding frames
};

CollisionStats collision_stats(const std::vector<Eigen::VectorXd>& configurations, const model::GripperModel& model,
                               const adapt::CollisionContext& ctx);

}  // namespace dexgrasp::metrics
