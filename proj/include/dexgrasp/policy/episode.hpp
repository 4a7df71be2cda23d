#pragma once

#include "dexgrasp/adapt/adapter.hpp"
#include "dexgrasp/metrics/metrics.hpp"
#include "dexgrasp/policy/policy.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <vector>

namespace dexgrasp::policy {

struct EpisodeConfig {
  int step_cap = 50;
  ibs::IbsParams ibs;
  double contact_delta = 0.002;
};

struct FrameTimings {
  double features_ms = 0.0;
  double prediction_ms = 0.0;
  double adaptation_ms = 0.0;
  double total_ms = 0.0;
};

struct Frame {
  int step = 0;
  Eigen::VectorXd q;  // after the step
  model::BasePose base;
  Action action;
  std::vector<metrics::Contact> contacts;
  int finger_contacts = 0;
  double self_collision = 0.0;
  int ibs_points = 0;  // refined IBS points before resampling; 0 when none in range
  FrameTimings timings;
  bool stop = false;
};

struct Trajectory {
  std::vector<Frame> frames;
  bool stopped = false;
};

/// Kinematic rollout against a static scene: features, policy, adaptation,
/// clamping and a base step per frame, until the stop gate fires or the step cap.
Trajectory run_episode(const PolicyNet& net, adapt::Adapter& adapter, const model::GripperModel& model,
                       const adapt::CollisionContext& ctx, const geom::Scene& scene, const Eigen::VectorXd& q0,
                       const model::BasePose& base0, const EpisodeConfig& cfg = {});

/// Observation of the gripper in a scene; an out-of-range IBS gives an empty cloud.
Observation observe(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                    const model::BasePose& base, const ibs::IbsParams& params);

nlohmann::json frame_json(const Frame& frame, bool timings = true);
void write_jsonl(std::ostream& out, const Trajectory& trajectory, bool timings = true);

}  // namespace dexgrasp::policy
