#pragma once

#include "dexgrasp/adapt/losses.hpp"
#include "dexgrasp/nn/layers.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dexgrasp::adapt {

struct AdaptationNetConfig {
  std::vector<int> hidden = {256, 256, 256};
  double keypoint_scale = 0.1;       // meters per unit input
  double displacement_scale = 0.01;  // meters per unit input
  double output_scale = 0.1;         // radians per unit output
};

/// MLP from (q, finger keypoints, keypoint displacements) to a joint change.
/// The output layer starts at zero, so an untrained net predicts dj = 0.
class AdaptationNet {
 public:
  AdaptationNet(const model::GripperModel& model, std::uint64_t seed = 0, const AdaptationNetConfig& cfg = {});

  int input_dim() const { return dof_ + 12 * fingers_; }
  int output_dim() const { return dof_; }

  /// Network input rows for a batch (one sample per row).
  nn::Matrix inputs(const std::vector<Eigen::VectorXd>& q, const std::vector<Eigen::VectorXd>& keypoints,
                    const std::vector<Eigen::VectorXd>& dp) const;
  /// Batch forward recorded on a graph; rows are joint changes.
  nn::Var forward(nn::Graph& g, const nn::Matrix& inputs) const;
  /// Single-sample prediction without a graph.
  Eigen::VectorXd predict(const Eigen::VectorXd& q, const Eigen::VectorXd& keypoints, const Eigen::VectorXd& dp) const;

  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }
  const AdaptationNetConfig& config() const { return cfg_; }

  void save(const std::filesystem::path& path, const nlohmann::json& extra = {}) const;
  void load(const std::filesystem::path& path);

 private:
  int dof_;
  int fingers_;
  AdaptationNetConfig cfg_;
  nn::ParamStore store_;
  nn::Mlp mlp_;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int updates = 20000;
  int batch = 256;
  double sigma = 0.05;  // std-dev of sampled joint changes, radians
  double omega = 1.0;
  double lr = 1e-3;
  double final_lr = 1e-5;  // cosine decay target
  int collision_points = 64;
  int max_updates = 100000;
  std::uint64_t seed = 0;
  int log_every = 100;
};

struct TrainResult {
  std::vector<double> loss;  // per update, batch mean
};

/// Self-supervised training on random configurations: sample q in limits and
/// a joint change, derive the keypoint displacement through FK, and minimise
/// the cycle plus self-collision loss of the predicted change.
TrainResult train_adaptation(AdaptationNet& net, const model::GripperModel& model, const TrainConfig& cfg,
                             const std::function<void(int, double)>& progress = {});

/// Held-out sample of the training distribution.
struct AdaptationSample {
  Eigen::VectorXd q;
  Eigen::VectorXd dj;
  Eigen::VectorXd dp;
};

std::vector<AdaptationSample> sample_adaptation_set(const model::GripperModel& model, int count, double sigma,
                                                    std::uint64_t seed);

struct TrackingReport {
  double mean_error = 0.0;         // mean keypoint tracking error norm
  double mean_command = 0.0;       // mean commanded displacement norm
  double relative = 0.0;           // mean_error / mean_command
  std::vector<double> per_sample;  // error norms
};

/// Applies `solve` to each sample and measures the displacement actually reached through FK.
TrackingReport evaluate_tracking(
    const model::GripperModel& model, const std::vector<AdaptationSample>& samples,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& solve);

}  // namespace dexgrasp::adapt
