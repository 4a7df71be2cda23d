#pragma once

#include "dexgrasp/model/kinematics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace dexgrasp::adapt {

using geom::Vec3;

/// Surface samples and hull pairs for the self-collision penalty.
struct CollisionContext {
  std::vector<std::vector<Vec3>> samples;  // per link, link-local
  std::vector<std::pair<int, int>> pairs;  // (sampled link, hull link), both orders present
  std::vector<double> hull_radius;         // per link, bounding radius about the hull centroid

  /// Samples `points_per_link` per link and lists every link pair except
  /// parent/child neighbours and links without geometry.
  static CollisionContext build(const model::GripperModel& model, int points_per_link = 64, std::uint64_t seed = 0);

  bool excluded(int a, int b) const;
};

/// Value plus gradient with respect to the optimisation variable.
struct LossValue {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Half squared error between the keypoints reached at clamp(q + dj) and the
/// commanded targets p(q) + dp, summed over all 2K keypoints. The gradient is
/// w.r.t. dj; coordinates pushed outside their limits receive zero gradient.
LossValue cycle_point_loss(const model::GripperModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& dj,
                           const Eigen::VectorXd& dp);

/// Sum over link samples of their penetration depth into other links' hulls,
/// at configuration `q`, with the gradient w.r.t. q.
LossValue self_collision_loss(const model::GripperModel& model, const CollisionContext& ctx, const Eigen::VectorXd& q);

/// Cycle loss plus `omega` times the self-collision loss at clamp(q + dj); gradient w.r.t. dj.
LossValue total_adaptation_loss(const model::GripperModel& model, const CollisionContext& ctx,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& dj, const Eigen::VectorXd& dp,
                                double omega = 1.0);

}  // namespace dexgrasp::adapt
