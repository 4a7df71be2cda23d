#pragma once

#include "dexgrasp/adapt/solvers.hpp"
#include "dexgrasp/model/kinematics.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace dexgrasp::retarget {

/// Source-to-target joint name pairs.
using NameMap = std::vector<std::pair<std::string, std::string>>;

/// Parses `source_joint target_joint` lines; blank lines and '#' comments are skipped.
NameMap parse_name_map(const std::string& text);
NameMap load_name_map(const std::filesystem::path& path);
/// Pairs every actuated joint name present in both grippers.
NameMap identity_name_map(const model::GripperModel& source, const model::GripperModel& target);
/// The same pairs read target-to-source.
NameMap inverted(const NameMap& map);

/// Joint matching: each mapped angle is rescaled linearly from the source
/// limit interval to the target one and clamped; unmapped target joints stay at rest.
Eigen::VectorXd joint_matching_map(const model::GripperModel& source, const Eigen::VectorXd& q_source,
                                   const model::GripperModel& target, const NameMap& map);

/// Distance from the root keypoint to the tip of the middle finger (or the
/// last finger on smaller hands) at rest.
double hand_size(const model::GripperModel& model);
/// Keypoint scale from source to target hand size.
double default_scale(const model::GripperModel& source, const model::GripperModel& target);

/// Finger keypoints relative to the root keypoint (6K, base frame).
Eigen::VectorXd local_keypoints(const model::GripperModel& model, const Eigen::VectorXd& q);

struct KmOptions {
  int iterations = 500;
  double step = 1.0;
  int max_halvings = 30;
  double damping = 1e-6;  // relative to the largest diagonal entry of J^T J
};

struct KmResult {
  Eigen::VectorXd q;
  double residual = 0.0;  // half squared keypoint error at q
  int iterations = 0;
};

/// Keypoint matching: projected descent over absolute joint angles on
/// 1/2 sum |kp_target(q) - scale * kp_source|^2, stepping along the damped
/// Gauss-Newton direction with backtracking. Fingers are paired by index up
/// to the smaller finger count.
KmResult keypoint_matching_solve(const Eigen::VectorXd& source_keypoints, const model::GripperModel& target,
                                 const Eigen::VectorXd& q_init, double scale, const KmOptions& options = {});

using ConfigMap = std::function<Eigen::VectorXd(const Eigen::VectorXd& q, const Eigen::VectorXd& previous)>;

/// Joint-matching mapping as a ConfigMap.
ConfigMap jm_map(const model::GripperModel& from, const model::GripperModel& to, const NameMap& map);
/// Keypoint-matching mapping, warm-started from the previous mapped configuration.
ConfigMap km_map(const model::GripperModel& from, const model::GripperModel& to, const KmOptions& options = {});

/// Motion retargeting: maps each recorded source frame; `start` seeds the first warm start.
std::vector<Eigen::VectorXd> mr_pipeline(const std::vector<Eigen::VectorXd>& source_frames, const ConfigMap& to_target,
                                         const Eigen::VectorXd& start);

/// Policy transfer: per step, map target to source, ask the source policy for
/// its next configuration, and map that back to the target.
std::vector<Eigen::VectorXd> pt_pipeline(const Eigen::VectorXd& target_start, int steps,
                                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& source_step,
                                         const ConfigMap& to_source, const ConfigMap& to_target,
                                         const Eigen::VectorXd& source_start);

}  // namespace dexgrasp::retarget
