#pragma once

#include "dexgrasp/ibs/ibs.hpp"
#include "dexgrasp/model/kinematics.hpp"
#include "dexgrasp/nn/layers.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dexgrasp::policy {

using geom::Vec3;

struct Action {
  Eigen::MatrixXd fingers;  // K x 6: middle then tip displacement, gripper-local, meters
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  // axis-angle increment, world frame
  double stop = 0.0;

  int finger_count() const { return static_cast<int>(fingers.rows()); }
  /// Finger displacements stacked as 6K (finger-major, middle then tip).
  Eigen::VectorXd keypoint_displacements() const;
  /// K*6 + 6 + 1 values: finger rows, translation, rotation, stop.
  Eigen::VectorXd flat() const;
};

struct PolicyConfig {
  nn::AttentionConfig attention;  // token width = attention.width
  int layers = 2;
  std::vector<int> keypoint_hidden = {64};
  std::vector<int> point_hidden = {64, 128};
  std::vector<int> head_hidden = {128};
  double length_scale = 0.1;          // meters per unit input
  double point_cap = 0.01;            // meters per keypoint per step
  double rotation_cap = 0.0872664626;  // 5 degrees
};

/// Policy input: keypoint state plus the IBS cloud (possibly empty).
struct Observation {
  model::KeypointState keypoints;
  ibs::IbsFeatureCloud cloud;

  int finger_count() const { return static_cast<int>(keypoints.fingers.size()); }
};

/// Gripper-agnostic policy: one keypoint token and one local IBS token per
/// component, one global IBS token, a transformer over all of them, a shared
/// per-finger displacement head and two pooled global heads. Encoders are
/// shared by role (palm, thumb, other fingers), so one parameter set serves
/// any finger count.
class PolicyNet {
 public:
  explicit PolicyNet(std::uint64_t seed = 0, const PolicyConfig& cfg = {});

  /// Encoded tokens, (2(K+1) + 1) x width: keypoint tokens for components
  /// 0..K, local IBS tokens for 0..K, then the global token.
  nn::Var encode_tokens(nn::Graph& g, const Observation& obs) const;
  /// Raw action outputs as one 1 x (6K + 7) row.
  nn::Var forward(nn::Graph& g, const Observation& obs) const;
  Action act(const Observation& obs) const;

  /// Keypoint group vector of component c (9 values, before scaling).
  static Eigen::VectorXd keypoint_group(const model::KeypointState& kp, int component);

  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }
  const PolicyConfig& config() const { return cfg_; }
  int width() const { return cfg_.attention.width; }

  void save(const std::filesystem::path& path, const nlohmann::json& extra = {}) const;
  void load(const std::filesystem::path& path);

 private:
  nn::Var local_token(nn::Graph& g, const Eigen::MatrixXd& features, const std::vector<int>& rows, int role) const;

  PolicyConfig cfg_;
  nn::ParamStore store_;
  nn::Mlp keypoint_enc_[3];
  nn::PointSetEncoder local_enc_[3];
  nn::PointSetEncoder global_enc_;
  nn::Parameter* empty_[3] = {nullptr, nullptr, nullptr};
  nn::Parameter* kind_[7] = {};  // keypoint x3 roles, local x3 roles, global
  nn::TransformerEncoder transformer_;
  nn::Mlp finger_head_;
  nn::Mlp pool_pre_[2];
  nn::Mlp motion_head_;
  nn::Mlp stop_head_;
};

/// Terminate when the stop value is positive and more than two finger contacts hold.
bool decide_stop(double stop_value, int contact_count);

/// Role of component c: 0 palm, 1 thumb, 2 other fingers.
inline int component_role(int c) { return c < 2 ? c : 2; }

struct CloningSample {
  Observation obs;
  Eigen::VectorXd target;  // flat action
};

/// Behaviour cloning on fixed targets with a mean squared error; returns the
/// per-step loss.
std::vector<double> train_cloning(PolicyNet& net, const std::vector<CloningSample>& samples, int steps,
                                  double lr = 1e-3);

}  // namespace dexgrasp::policy
