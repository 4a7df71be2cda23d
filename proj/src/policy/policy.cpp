#include "dexgrasp/policy/policy.hpp"

#include <stdexcept>
#include <string>

namespace dexgrasp::policy {

namespace {

const char* kRoleNames[3] = {"palm", "thumb", "finger"};
constexpr int kLocalFeatures = 7;
constexpr int kGlobalFeatures = 10;

std::vector<int> with_ends(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

Eigen::VectorXd Action::keypoint_displacements() const {
  Eigen::VectorXd out(6 * fingers.rows());
  for (Eigen::Index k = 0; k < fingers.rows(); ++k) out.segment(6 * k, 6) = fingers.row(k).transpose();
  return out;
}

Eigen::VectorXd Action::flat() const {
  Eigen::VectorXd out(6 * fingers.rows() + 7);
  out << keypoint_displacements(), translation, rotation, stop;
  return out;
}

PolicyNet::PolicyNet(std::uint64_t seed, const PolicyConfig& cfg) : cfg_(cfg) {
  std::mt19937_64 rng(seed);
  const int w = cfg_.attention.width;
  using Init = nn::ParamStore::Init;
  for (int r = 0; r < 3; ++r) {
    const std::string role = kRoleNames[r];
    keypoint_enc_[r] = nn::Mlp(store_, "keypoint." + role, with_ends(9, cfg_.keypoint_hidden, w), rng);
    local_enc_[r] = nn::PointSetEncoder(store_, "local." + role, kLocalFeatures, cfg_.point_hidden, w, rng);
    empty_[r] = &store_.create("empty." + role, 1, w, Init::Xavier, rng);
  }
  global_enc_ = nn::PointSetEncoder(store_, "global", kGlobalFeatures, cfg_.point_hidden, w, rng);
  for (int i = 0; i < 7; ++i) kind_[i] = &store_.create("kind." + std::to_string(i), 1, w, Init::Xavier, rng);
  transformer_ = nn::TransformerEncoder(store_, "transformer", cfg_.layers, cfg_.attention, rng);
  finger_head_ = nn::Mlp(store_, "head.finger", with_ends(2 * w, cfg_.head_hidden, 6), rng);
  pool_pre_[0] = nn::Mlp(store_, "pool.motion", {2 * w, w}, rng);
  pool_pre_[1] = nn::Mlp(store_, "pool.stop", {2 * w, w}, rng);
  motion_head_ = nn::Mlp(store_, "head.motion", with_ends(2 * w, cfg_.head_hidden, 6), rng);
  stop_head_ = nn::Mlp(store_, "head.stop", with_ends(2 * w, cfg_.head_hidden, 1), rng);
}

Eigen::VectorXd PolicyNet::keypoint_group(const model::KeypointState& kp, int component) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(9);
  if (component == 0) {
    v << kp.root, kp.rotation, Vec3::Zero();
  } else {
    const auto& f = kp.fingers.at(component - 1);
    v << f[0], f[1], kp.rotation;
  }
  return v;
}

nn::Var PolicyNet::local_token(nn::Graph& g, const Eigen::MatrixXd& features, const std::vector<int>& rows,
                               int role) const {
  if (rows.empty()) return g.param(*empty_[role]);
  nn::Matrix x(rows.size(), kLocalFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(i) = features.row(rows[i]);
  return local_enc_[role].forward(g, g.constant(x));
}

nn::Var PolicyNet::encode_tokens(nn::Graph& g, const Observation& obs) const {
  const int fingers = obs.finger_count();
  const int comps = fingers + 1;
  const auto& cloud = obs.cloud;
  if (fingers < 1) throw std::invalid_argument("policy input has no fingers");
  if (!cloud.points.empty() && cloud.component_count != comps)
    throw std::invalid_argument("IBS component count does not match the keypoint state");

  const double inv = 1.0 / cfg_.length_scale;
  const int n = static_cast<int>(cloud.size());
  Eigen::MatrixXd local(n, kLocalFeatures);
  nn::Matrix global(n, kGlobalFeatures);
  std::vector<std::vector<int>> members(comps);
  for (int i = 0; i < n; ++i) {
    const auto& p = cloud.points[i];
    local.row(i) << inv * p.c.transpose(), inv * p.d_s, inv * p.d_g, double(p.b_s), p.a_g;
    global.row(i).head(kLocalFeatures) = local.row(i);
    global.row(i).tail(3).setZero();
    global(i, kLocalFeatures + component_role(p.component)) = 1.0;
    members.at(p.component).push_back(i);
  }

  std::vector<nn::Var> tokens;
  for (int c = 0; c < comps; ++c) {
    const int role = component_role(c);
    Eigen::VectorXd group = keypoint_group(obs.keypoints, c);
    if (c == 0) group.head(3) *= inv;
    else group.head(6) *= inv;
    const nn::Matrix row = group.transpose();
    tokens.push_back(g.add(keypoint_enc_[role].forward(g, g.constant(row)), g.param(*kind_[role])));
  }
  for (int c = 0; c < comps; ++c) {
    const int role = component_role(c);
    tokens.push_back(g.add(local_token(g, local, members[c], role), g.param(*kind_[3 + role])));
  }
  const nn::Var glob = n > 0 ? global_enc_.forward(g, g.constant(global)) : g.constant(nn::Matrix::Zero(1, width()));
  tokens.push_back(g.add(glob, g.param(*kind_[6])));
  return g.concat_rows(tokens);
}

nn::Var PolicyNet::forward(nn::Graph& g, const Observation& obs) const {
  const int fingers = obs.finger_count();
  const int comps = fingers + 1;
  const nn::Var t = transformer_.forward(g, encode_tokens(g, obs));
  const nn::Var comp = g.concat_cols({g.slice_rows(t, 0, comps), g.slice_rows(t, comps, comps)});
  const nn::Var glob = g.slice_rows(t, 2 * comps, 1);

  const nn::Var fing = g.norm_cap(finger_head_.forward(g, g.slice_rows(comp, 1, fingers)), 3, cfg_.point_cap);
  std::vector<nn::Var> parts;
  for (int k = 0; k < fingers; ++k) parts.push_back(g.slice_rows(fing, k, 1));

  const nn::Var motion_in = g.concat_cols({g.max_rows(pool_pre_[0].forward(g, comp)), glob});
  const nn::Var stop_in = g.concat_cols({g.max_rows(pool_pre_[1].forward(g, comp)), glob});
  const nn::Var motion = motion_head_.forward(g, motion_in);
  parts.push_back(g.norm_cap(g.slice_cols(motion, 0, 3), 3, cfg_.point_cap));
  parts.push_back(g.norm_cap(g.slice_cols(motion, 3, 3), 3, cfg_.rotation_cap));
  parts.push_back(stop_head_.forward(g, stop_in));
  return g.concat_cols(parts);
}

Action PolicyNet::act(const Observation& obs) const {
  nn::Graph g;
  const nn::Matrix& out = g.value(forward(g, obs));
  const int fingers = obs.finger_count();
  Action a;
  a.fingers.resize(fingers, 6);
  for (int k = 0; k < fingers; ++k) a.fingers.row(k) = out.row(0).segment(6 * k, 6);
  a.translation = out.row(0).segment(6 * fingers, 3).transpose();
  a.rotation = out.row(0).segment(6 * fingers + 3, 3).transpose();
  a.stop = out(0, 6 * fingers + 6);
  return a;
}

void PolicyNet::save(const std::filesystem::path& path, const nlohmann::json& extra) const {
  nlohmann::json meta = extra;
  meta["kind"] = "policy";
  meta["width"] = cfg_.attention.width;
  meta["heads"] = cfg_.attention.heads;
  meta["ff_width"] = cfg_.attention.ff_width;
  meta["layers"] = cfg_.layers;
  meta["keypoint_hidden"] = cfg_.keypoint_hidden;
  meta["point_hidden"] = cfg_.point_hidden;
  meta["head_hidden"] = cfg_.head_hidden;
  meta["length_scale"] = cfg_.length_scale;
  meta["point_cap"] = cfg_.point_cap;
  meta["rotation_cap"] = cfg_.rotation_cap;
  store_.save(path, meta);
}

void PolicyNet::load(const std::filesystem::path& path) {
  const auto meta = nn::ParamStore::read_meta(path);
  if (meta.value("kind", "") != "policy") throw std::runtime_error("checkpoint does not hold a policy net");
  if (meta.value("width", -1) != cfg_.attention.width || meta.value("layers", -1) != cfg_.layers ||
      meta.value("heads", -1) != cfg_.attention.heads)
    throw std::runtime_error("checkpoint architecture differs from the configured policy");
  store_.load(path);
  cfg_.length_scale = meta.value("length_scale", cfg_.length_scale);
  cfg_.point_cap = meta.value("point_cap", cfg_.point_cap);
  cfg_.rotation_cap = meta.value("rotation_cap", cfg_.rotation_cap);
}

bool decide_stop(double stop_value, int contact_count) { return stop_value > 0.0 && contact_count > 2; }

std::vector<double> train_cloning(PolicyNet& net, const std::vector<CloningSample>& samples, int steps, double lr) {
  std::vector<double> losses;
  if (samples.empty()) return losses;
  nn::AdamConfig adam;
  adam.lr = lr;
  for (int s = 0; s < steps; ++s) {
    net.params().zero_grad();
    double total = 0.0;
    for (const auto& sample : samples) {
      nn::Graph g;
      const nn::Var out = net.forward(g, sample.obs);
      const nn::Matrix target = sample.target.transpose();
      if (g.cols(out) != target.cols()) throw std::invalid_argument("cloning target has the wrong length");
      const nn::Var err = g.sub(out, g.constant(target));
      const nn::Var loss = g.scale(g.mean(g.mul(err, err)), 1.0 / samples.size());
      g.backward(loss);
      total += g.value(loss)(0, 0);
    }
    net.params().adam_step(adam);
    losses.push_back(total);
  }
  return losses;
}

}  // namespace dexgrasp::policy
