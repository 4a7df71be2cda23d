#include "dexgrasp/policy/episode.hpp"

#include <chrono>
#include <ostream>

namespace dexgrasp::policy {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
std::vector<double> to_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

Observation observe(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                    const model::BasePose& base, const ibs::IbsParams& params) {
  Observation obs;
  obs.keypoints = model::keypoint_state(model, q, base);
  try {
    obs.cloud = ibs::sample_ibs(scene, model, q, base, params);
  } catch (const ibs::NoIbsError&) {
    obs.cloud = {};
    obs.cloud.component_count = model.component_count();
    obs.cloud.base = base;
  }
  return obs;
}

Trajectory run_episode(const PolicyNet& net, adapt::Adapter& adapter, const model::GripperModel& model,
                       const adapt::CollisionContext& ctx, const geom::Scene& scene, const Eigen::VectorXd& q0,
                       const model::BasePose& base0, const EpisodeConfig& cfg) {
  Trajectory traj;
  const metrics::ContactDetector detector(scene);
  Eigen::VectorXd q = model::clamp_joints(model, q0).q;
  model::BasePose base = base0;
  for (int step = 0; step < cfg.step_cap; ++step) {
    Frame f;
    f.step = step;
    const auto t0 = Clock::now();
    const Observation obs = observe(scene, model, q, base, cfg.ibs);
    f.ibs_points = obs.cloud.survivors;
    f.timings.features_ms = ms_since(t0);

    const auto t1 = Clock::now();
    f.action = net.act(obs);
    f.timings.prediction_ms = ms_since(t1);

    const auto t2 = Clock::now();
    const Eigen::VectorXd dj = adapter.adapt(q, f.action.keypoint_displacements());
    f.timings.adaptation_ms = ms_since(t2);
    f.timings.total_ms = ms_since(t0);

    q = model::clamp_joints(model, q + dj).q;
    base = base.stepped(f.action.translation, f.action.rotation);
    f.q = q;
    f.base = base;
    f.contacts = detector.detect(model, q, base, cfg.contact_delta);
    f.finger_contacts = metrics::finger_contact_count(f.contacts);
    f.self_collision = adapt::self_collision_loss(model, ctx, q).value;
    f.stop = decide_stop(f.action.stop, f.finger_contacts);
    traj.frames.push_back(std::move(f));
    if (traj.frames.back().stop) {
      traj.stopped = true;
      break;
    }
  }
  return traj;
}

nlohmann::json frame_json(const Frame& frame, bool timings) {
  nlohmann::json j;
  j["step"] = frame.step;
  j["q"] = to_vec(frame.q);
  j["base"] = {{"translation", to_vec(frame.base.translation)}, {"rotation", to_vec(frame.base.rotation)}};
  j["action"] = {{"fingers", to_vec(frame.action.keypoint_displacements())},
                 {"translation", to_vec(frame.action.translation)},
                 {"rotation", to_vec(frame.action.rotation)},
                 {"stop", frame.action.stop}};
  nlohmann::json contacts = nlohmann::json::array();
  for (const auto& c : frame.contacts)
    contacts.push_back({{"link", c.link},
                        {"component", c.component},
                        {"point", to_vec(c.point)},
                        {"normal", to_vec(c.normal)},
                        {"distance", c.distance}});
  j["contacts"] = contacts;
  j["finger_contacts"] = frame.finger_contacts;
  j["self_collision"] = frame.self_collision;
  j["ibs_points"] = frame.ibs_points;
  if (timings)
    j["timings"] = {{"features_ms", frame.timings.features_ms},
                    {"prediction_ms", frame.timings.prediction_ms},
                    {"adaptation_ms", frame.timings.adaptation_ms},
                    {"total_ms", frame.timings.total_ms}};
  j["stop"] = frame.stop;
  return j;
}

void write_jsonl(std::ostream& out, const Trajectory& trajectory, bool timings) {
  for (const auto& f : trajectory.frames) out << frame_json(f, timings).dump() << '\n';
}

}  // namespace dexgrasp::policy
