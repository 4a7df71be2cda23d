#pragma once

#include "dexgrasp/adapt/adapter.hpp"
#include "dexgrasp/harness/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dexgrasp::harness {

/// Median over `batches` contiguous batch means of the samples that follow
/// the first `warmup` entries. Zero for an empty input.
double robust_ms(const std::vector<double>& samples, int warmup, int batches);

/// One policy step's input to the adaptation stage.
struct BenchFrame {
  Eigen::VectorXd q;
  model::BasePose base;
  Eigen::VectorXd dp;  // 6K keypoint displacements from the policy
  double features_ms = 0.0;
  double prediction_ms = 0.0;
  int ibs_points = 0;
};

/// Frames at sampled initial poses around the scene object with joint
/// angles drawn from the middle half of the limits; features and policy
/// prediction are timed per frame (after `warmup` untimed extractions).
std::vector<BenchFrame> make_bench_frames(const model::GripperModel& model, const geom::Scene& scene,
                                          const policy::PolicyNet& net, const Config& cfg, int count);

struct BenchRow {
  std::string method;
  int frames = 0;
  double features_ms = 0.0;
  double prediction_ms = 0.0;
  double adaptation_ms = 0.0;
  double total_ms = 0.0;
  double collision_percentage = 0.0;
  double collision_loss = 0.0;
};

/// Runs every adapter on the same frames: warm-up passes, then per-frame
/// timing; collision statistics of the adapted configurations.
std::vector<BenchRow> bench_adaptation(const model::GripperModel& model, const adapt::CollisionContext& ctx,
                                       const std::vector<BenchFrame>& frames,
                                       const std::vector<adapt::Adapter*>& adapters, const BenchConfig& bench);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
nlohmann::json bench_json(const std::vector<BenchRow>& rows);

enum class Representation { Ibs, Ocm, Gcm };
Representation parse_representation(const std::string& name);
std::string representation_name(Representation r);

struct ReprRow {
  std::string representation;
  std::string scene;
  int frames = 0;
  int failures = 0;  // frames without an IBS in range
  double extract_ms = 0.0;
  double mean_points = 0.0;
  double mean_survivors = 0.0;  // refined IBS points before resampling (IBS only)
  double mean_distance = 0.0;   // mean scene distance feature
};

ReprRow bench_representation(const model::GripperModel& model, const geom::Scene& scene, const std::string& scene_name,
                             Representation rep, const Config& cfg, int frames);

void write_repr_csv(std::ostream& out, const std::vector<ReprRow>& rows);

}  // namespace dexgrasp::harness
