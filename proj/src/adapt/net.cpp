#include "dexgrasp/adapt/net.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dexgrasp::adapt {

AdaptationNet::AdaptationNet(const model::GripperModel& model, std::uint64_t seed, const AdaptationNetConfig& cfg)
    : dof_(model.dof()), fingers_(model.finger_count()), cfg_(cfg) {
  std::mt19937_64 rng(seed);
  std::vector<int> widths{input_dim()};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(dof_);
  mlp_ = nn::Mlp(store_, "adapt", widths, rng, true);
}

nn::Matrix AdaptationNet::inputs(const std::vector<Eigen::VectorXd>& q, const std::vector<Eigen::VectorXd>& keypoints,
                                 const std::vector<Eigen::VectorXd>& dp) const {
  const Eigen::Index n = static_cast<Eigen::Index>(q.size());
  nn::Matrix x(n, input_dim());
  const int k6 = 6 * fingers_;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q[i].size() != dof_ || keypoints[i].size() != k6 || dp[i].size() != k6)
      throw std::invalid_argument("adaptation input dimensions do not match the gripper");
    x.row(i).head(dof_) = q[i].transpose();
    x.row(i).segment(dof_, k6) = keypoints[i].transpose() / cfg_.keypoint_scale;
    x.row(i).tail(k6) = dp[i].transpose() / cfg_.displacement_scale;
  }
  return x;
}

nn::Var AdaptationNet::forward(nn::Graph& g, const nn::Matrix& inputs) const {
  return g.scale(mlp_.forward(g, g.constant(inputs)), cfg_.output_scale);
}

Eigen::VectorXd AdaptationNet::predict(const Eigen::VectorXd& q, const Eigen::VectorXd& keypoints,
                                       const Eigen::VectorXd& dp) const {
  const nn::Matrix y = mlp_.infer(inputs({q}, {keypoints}, {dp})) * cfg_.output_scale;
  return y.row(0).transpose();
}

void AdaptationNet::save(const std::filesystem::path& path, const nlohmann::json& extra) const {
  nlohmann::json meta = extra;
  meta["kind"] = "adaptation";
  meta["dof"] = dof_;
  meta["fingers"] = fingers_;
  meta["hidden"] = cfg_.hidden;
  meta["keypoint_scale"] = cfg_.keypoint_scale;
  meta["displacement_scale"] = cfg_.displacement_scale;
  meta["output_scale"] = cfg_.output_scale;
  store_.save(path, meta);
}

void AdaptationNet::load(const std::filesystem::path& path) {
  const auto meta = nn::ParamStore::read_meta(path);
  if (meta.value("kind", "") != "adaptation" || meta.value("dof", -1) != dof_ || meta.value("fingers", -1) != fingers_)
    throw std::runtime_error("checkpoint does not hold an adaptation net for this gripper");
  if (meta.value("hidden", std::vector<int>{}) != cfg_.hidden)
    throw std::runtime_error("checkpoint hidden widths differ from the configured net");
  store_.load(path);
  cfg_.keypoint_scale = meta.value("keypoint_scale", cfg_.keypoint_scale);
  cfg_.displacement_scale = meta.value("displacement_scale", cfg_.displacement_scale);
  cfg_.output_scale = meta.value("output_scale", cfg_.output_scale);
}

namespace {

AdaptationSample draw_sample(const model::GripperModel& model, double sigma, std::mt19937_64& rng) {
  AdaptationSample s;
  const int dof = model.dof();
  s.q.resize(dof);
  s.dj.resize(dof);
  std::normal_distribution<double> normal(0.0, sigma);
  for (int d = 0; d < dof; ++d) s.q[d] = std::uniform_real_distribution<double>(model.lower()[d], model.upper()[d])(rng);
  for (int d = 0; d < dof; ++d) s.dj[d] = normal(rng);
  const Eigen::VectorXd target = model::clamp_joints(model, s.q + s.dj).q;
  s.dj = target - s.q;
  s.dp = model::finger_keypoints(model, target) - model::finger_keypoints(model, s.q);
  return s;
}

}  // namespace

std::vector<AdaptationSample> sample_adaptation_set(const model::GripperModel& model, int count, double sigma,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AdaptationSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(draw_sample(model, sigma, rng));
  return out;
}

TrainResult train_adaptation(AdaptationNet& net, const model::GripperModel& model, const TrainConfig& cfg,
                             const std::function<void(int, double)>& progress) {
  if (cfg.updates < 0 || cfg.updates > cfg.max_updates)
    throw std::invalid_argument("adaptation update budget must lie in [0, " + std::to_string(cfg.max_updates) + "]");
  if (cfg.batch < 1) throw std::invalid_argument("adaptation batch must be positive");
  TrainResult result;
  if (cfg.updates == 0) return result;

  const CollisionContext ctx = CollisionContext::build(model, cfg.collision_points, cfg.seed);
  std::mt19937_64 rng(cfg.seed + 1);
  const int dof = model.dof();
  result.loss.reserve(cfg.updates);

  std::vector<Eigen::VectorXd> qs(cfg.batch), kps(cfg.batch), dps(cfg.batch);
  for (int u = 0; u < cfg.updates; ++u) {
    for (int b = 0; b < cfg.batch; ++b) {
      const AdaptationSample s = draw_sample(model, cfg.sigma, rng);
      qs[b] = s.q;
      kps[b] = model::finger_keypoints(model, s.q);
      dps[b] = s.dp;
    }
    nn::Graph g;
    const nn::Var out = net.forward(g, net.inputs(qs, kps, dps));
    const nn::Matrix& dj = g.value(out);
    nn::Matrix upstream(cfg.batch, dof);
    double total = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const LossValue l = total_adaptation_loss(model, ctx, qs[b], dj.row(b).transpose(), dps[b], cfg.omega);
      total += l.value;
      upstream.row(b) = l.grad.transpose() / cfg.batch;
    }
    const double mean = total / cfg.batch;
    if (!std::isfinite(mean)) {
      std::ostringstream msg;
      msg << "adaptation training diverged at update " << u << " (loss " << mean << ")";
      if (!result.loss.empty()) msg << ", previous loss " << result.loss.back();
      throw DivergenceError(msg.str());
    }
    result.loss.push_back(mean);

    net.params().zero_grad();
    g.backward(g.sum(g.mul(out, g.constant(upstream))));
    const double t = static_cast<double>(u) / std::max(1, cfg.updates - 1);
    nn::AdamConfig adam;
    adam.lr = cfg.final_lr + 0.5 * (cfg.lr - cfg.final_lr) * (1.0 + std::cos(std::numbers::pi * t));
    net.params().adam_step(adam);
    if (progress && cfg.log_every > 0 && (u + 1) % cfg.log_every == 0) progress(u + 1, mean);
  }
  return result;
}

TrackingReport evaluate_tracking(
    const model::GripperModel& model, const std::vector<AdaptationSample>& samples,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& solve) {
  TrackingReport rep;
  for (const auto& s : samples) {
    const Eigen::VectorXd dj = solve(s.q, s.dp);
    const Eigen::VectorXd reached =
        model::finger_keypoints(model, model::clamp_joints(model, s.q + dj).q) - model::finger_keypoints(model, s.q);
    const double err = (reached - s.dp).norm();
    rep.per_sample.push_back(err);
    rep.mean_error += err;
    rep.mean_command += s.dp.norm();
  }
  if (!samples.empty()) {
    rep.mean_error /= samples.size();
    rep.mean_command /= samples.size();
  }
  rep.relative = rep.mean_command > 0.0 ? rep.mean_error / rep.mean_command : 0.0;
  return rep;
}

}  // namespace dexgrasp::adapt
