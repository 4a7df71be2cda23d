#include "dexgrasp/retarget/retarget.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dexgrasp::retarget {

namespace {

int dof_of(const model::GripperModel& m, const std::string& joint) {
  const int j = m.joint_index(joint);
  if (j < 0) throw std::invalid_argument("unknown joint in name map: " + joint);
  return m.joints()[j].dof;
}

}  // namespace

NameMap parse_name_map(const std::string& text) {
  NameMap map;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra))
      throw std::invalid_argument("name map line " + std::to_string(number) + ": expected two joint names");
    map.emplace_back(a, b);
  }
  return map;
}

NameMap load_name_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open name map " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_name_map(ss.str());
}

NameMap identity_name_map(const model::GripperModel& source, const model::GripperModel& target) {
  NameMap map;
  for (const auto& j : source.joints()) {
    if (j.dof < 0) continue;
    const int t = target.joint_index(j.name);
    if (t >= 0 && target.joints()[t].dof >= 0) map.emplace_back(j.name, j.name);
  }
  return map;
}

NameMap inverted(const NameMap& map) {
  NameMap out;
  for (const auto& [a, b] : map) out.emplace_back(b, a);
  return out;
}

Eigen::VectorXd joint_matching_map(const model::GripperModel& source, const Eigen::VectorXd& q_source,
                                   const model::GripperModel& target, const NameMap& map) {
  Eigen::VectorXd q = target.rest();
  for (const auto& [from, to] : map) {
    const int s = dof_of(source, from);
    const int t = dof_of(target, to);
    if (s < 0 || t < 0) throw std::invalid_argument("name map pairs a joint that is not actuated");
    const double span = source.upper()[s] - source.lower()[s];
    const double u = span > 0.0 ? (q_source[s] - source.lower()[s]) / span : 0.0;
    q[t] = std::clamp(target.lower()[t] + u * (target.upper()[t] - target.lower()[t]), target.lower()[t],
                      target.upper()[t]);
  }
  return q;
}

Eigen::VectorXd local_keypoints(const model::GripperModel& model, const Eigen::VectorXd& q) {
  const auto kp = model::keypoint_state(model, q, model::BasePose{});
  Eigen::VectorXd out(6 * kp.fingers.size());
  for (std::size_t k = 0; k < kp.fingers.size(); ++k) {
    out.segment<3>(6 * k) = kp.fingers[k][0];
    out.segment<3>(6 * k + 3) = kp.fingers[k][1];
  }
  return out;
}

double hand_size(const model::GripperModel& model) {
  const Eigen::VectorXd kp = local_keypoints(model, model.rest());
  const int finger = std::min(2, model.finger_count() - 1);
  return kp.segment<3>(6 * finger + 3).norm();
}

double default_scale(const model::GripperModel& source, const model::GripperModel& target) {
  const double s = hand_size(source);
  return s > 0.0 ? hand_size(target) / s : 1.0;
}

KmResult keypoint_matching_solve(const Eigen::VectorXd& source_keypoints, const model::GripperModel& target,
                                 const Eigen::VectorXd& q_init, double scale, const KmOptions& options) {
  const int rows = static_cast<int>(std::min<Eigen::Index>(source_keypoints.size(), 6 * target.finger_count()));
  const Eigen::VectorXd goal = scale * source_keypoints.head(rows);
  // The descent direction is the damped Gauss-Newton step rather than the raw gradient.
  const adapt::Objective f = [&](const Eigen::VectorXd& q) {
    const Eigen::VectorXd err = local_keypoints(target, q).head(rows) - goal;
    const Eigen::MatrixXd jac = model::keypoint_jacobian(target, q).topRows(rows);
    Eigen::MatrixXd h = jac.transpose() * jac;
    h.diagonal().array() += options.damping * std::max(h.diagonal().maxCoeff(), 1e-12);
    return adapt::LossValue{0.5 * err.squaredNorm(), h.ldlt().solve(jac.transpose() * err)};
  };
  const auto project = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    return q.cwiseMax(target.lower()).cwiseMin(target.upper());
  };
  adapt::SolverOptions so;
  so.iterations = options.iterations;
  so.step = options.step;
  so.max_halvings = options.max_halvings;
  const Eigen::VectorXd start = project(q_init);
  const auto res = adapt::descend(f, start, project, options.step, so);
  return {res.dj, res.loss, res.iterations};
}

ConfigMap jm_map(const model::GripperModel& from, const model::GripperModel& to, const NameMap& map) {
  return [&from, &to, map](const Eigen::VectorXd& q, const Eigen::VectorXd&) {
    return joint_matching_map(from, q, to, map);
  };
}

ConfigMap km_map(const model::GripperModel& from, const model::GripperModel& to, const KmOptions& options) {
  const double scale = default_scale(from, to);
  return [&from, &to, options, scale](const Eigen::VectorXd& q, const Eigen::VectorXd& previous) {
    return keypoint_matching_solve(local_keypoints(from, q), to, previous, scale, options).q;
  };
}

std::vector<Eigen::VectorXd> mr_pipeline(const std::vector<Eigen::VectorXd>& source_frames, const ConfigMap& to_target,
                                         const Eigen::VectorXd& start) {
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd previous = start;
  for (const auto& q : source_frames) {
    previous = to_target(q, previous);
    out.push_back(previous);
  }
  return out;
}

std::vector<Eigen::VectorXd> pt_pipeline(const Eigen::VectorXd& target_start, int steps,
                                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& source_step,
                                         const ConfigMap& to_source, const ConfigMap& to_target,
                                         const Eigen::VectorXd& source_start) {
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd qt = target_start;
  Eigen::VectorXd qs = source_start;
  for (int i = 0; i < steps; ++i) {
    qs = to_source(qt, qs);
    qs = source_step(qs);
    qt = to_target(qs, qt);
    out.push_back(qt);
  }
  return out;
}

}  // namespace dexgrasp::retarget
