#include "dexgrasp/harness/cli.hpp"

#include "dexgrasp/geom/camera.hpp"
#include "dexgrasp/geom/gripper_queries.hpp"
#include "dexgrasp/geom/ply.hpp"
#include "dexgrasp/geom/pose_json.hpp"
#include "dexgrasp/harness/bench.hpp"
#include "dexgrasp/model/loader.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

namespace dexgrasp::harness {

namespace {

using nlohmann::json;

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

Config resolve(const Common& c) {
  Config cfg = c.config.empty() ? Config{} : load_config(c.config);
  if (c.seed) cfg.apply_seed(*c.seed);
  return cfg;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + item + "' as a number");
    }
  }
  return from_vec(values);
}

model::GripperModel load_gripper(const std::string& path) {
  try {
    return model::load_gripper_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("gripper spec: ") + e.what());
  }
}

geom::Scene load_scene_file(const std::string& path) {
  try {
    return geom::load_scene(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
}

Eigen::VectorXd joint_input(const model::GripperModel& m, const std::string& text) {
  if (text.empty()) return m.rest();
  const Eigen::VectorXd q = parse_list(text, "--q");
  if (q.size() != m.dof())
    throw ConfigError("--q has " + std::to_string(q.size()) + " values, the gripper has " + std::to_string(m.dof()) +
                      " joints");
  return model::clamp_joints(m, q).q;
}

model::BasePose base_input(const model::GripperModel& m, const geom::Scene& scene, const std::string& text,
                           const Config& cfg) {
  if (text.empty())
    return geom::sample_initial_poses(m, scene.object_center(), 1, cfg.seed, cfg.initial_radius).front();
  const Eigen::VectorXd v = parse_list(text, "--base");
  if (v.size() != 6) throw ConfigError("--base expects tx,ty,tz,rx,ry,rz");
  model::BasePose b;
  b.translation = v.head<3>();
  b.rotation = v.tail<3>();
  return b;
}

json base_json(const model::BasePose& b) {
  return {{"translation", geom::vec3_to_json(b.translation)}, {"rotation", geom::vec3_to_json(b.rotation)}};
}

model::BasePose base_from_json(const json& j) {
  model::BasePose b;
  b.translation = geom::vec3_from_json(j.at("translation"));
  b.rotation = geom::vec3_from_json(j.at("rotation"));
  return b;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ConfigError("cannot write " + c.out);
  f << text;
}

void write_sidecar(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << j.dump(2) << '\n';
}

void require_finite(const Eigen::VectorXd& v, const std::string& what) {
  if (!v.allFinite()) throw NumericFailure(what + " is not finite");
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(json::parse(line));
  }
  return rows;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "random seed (overrides the config)");
  sub->add_option("--out", c.out, "output path (stdout when omitted, where allowed)");
}

// --------------------------------------------------------------------------

struct FkArgs {
  Common common;
  std::string gripper, q, base;
};

void cmd_fk(const FkArgs& a, std::ostream& out) {
  const Config cfg = resolve(a.common);
  const auto m = load_gripper(a.gripper);
  const Eigen::VectorXd q = joint_input(m, a.q);
  model::BasePose base;
  if (!a.base.empty()) {
    const Eigen::VectorXd v = parse_list(a.base, "--base");
    if (v.size() != 6) throw ConfigError("--base expects tx,ty,tz,rx,ry,rz");
    base.translation = v.head<3>();
    base.rotation = v.tail<3>();
  }
  const auto frames = model::forward_kinematics(m, q, base);
  json j = result_envelope("fk", cfg);
  j["gripper"] = m.name();
  j["q"] = to_vec(q);
  j["base"] = base_json(base);
  json links = json::array();
  for (std::size_t i = 0; i < frames.size(); ++i)
    links.push_back({{"name", m.links()[i].name}, {"pose", geom::transform_to_json(frames[i])}});
  j["links"] = links;
  const auto kp = model::keypoint_state(m, q, base);
  j["keypoint_state"] = to_vec(kp.flat());
  emit(a.common, j.dump(2) + "\n", out);
}

struct IbsArgs {
  Common common;
  std::string gripper, scene, cloud, camera, q, base;
};

geom::Scene scene_input(const std::string& scene_path, const std::string& cloud_path, const std::string& camera) {
  if (!cloud_path.empty()) {
    geom::Scene s;
    geom::PointCloud cloud;
    try {
      cloud = geom::read_cloud_ply(cloud_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    const geom::Vec3 eye = camera.empty() ? geom::Vec3(geom::Vec3::Zero()) : geom::Vec3(geom::load_camera(camera).pose.translation());
    s.set_cloud(std::move(cloud), eye);
    s.build();
    return s;
  }
  if (scene_path.empty()) throw ConfigError("one of --scene or --cloud is required");
  return load_scene_file(scene_path);
}

void cmd_ibs(const IbsArgs& a) {
  if (a.common.out.empty()) throw ConfigError("ibs needs --out for the PLY cloud");
  const Config cfg = resolve(a.common);
  const auto m = load_gripper(a.gripper);
  const auto scene = scene_input(a.scene, a.cloud, a.camera);
  const Eigen::VectorXd q = joint_input(m, a.q);
  const auto base = base_input(m, scene, a.base, cfg);
  const auto cloud = ibs::sample_ibs(scene, m, q, base, cfg.ibs);
  std::vector<geom::Vec3> pts;
  std::vector<double> cx, cy, cz, ds, dg, bs, comp, ag;
  for (const auto& p : cloud.points) {
    if (!p.world.allFinite()) throw NumericFailure("non-finite IBS point");
    pts.push_back(p.world);
    cx.push_back(p.c.x());
    cy.push_back(p.c.y());
    cz.push_back(p.c.z());
    ds.push_back(p.d_s);
    dg.push_back(p.d_g);
    bs.push_back(p.b_s);
    comp.push_back(p.component);
    ag.push_back(p.a_g);
  }
  geom::write_ply(a.common.out, pts,
                  {{"cx", false, cx},
                   {"cy", false, cy},
                   {"cz", false, cz},
                   {"d_s", false, ds},
                   {"d_g", false, dg},
                   {"b_s", true, bs},
                   {"component", true, comp},
                   {"a_g", false, ag}});
  json j = result_envelope("ibs", cfg);
  j["gripper"] = m.name();
  j["q"] = to_vec(q);
  j["base"] = base_json(base);
  j["points"] = cloud.size();
  j["survivors"] = cloud.survivors;
  j["component_count"] = cloud.component_count;
  j["palm"] = geom::transform_to_json(cloud.palm);
  j["features"] = {"cx", "cy", "cz", "d_s", "d_g", "b_s", "component", "a_g"};
  write_sidecar(a.common.out + ".json", j);
}

struct RolloutArgs {
  Common common;
  std::string gripper, scene, checkpoint, adapter = "ob-ik", adapt_checkpoint, q, base;
  std::optional<int> steps;
};

void cmd_rollout(const RolloutArgs& a, std::ostream& out) {
  Config cfg = resolve(a.common);
  if (a.steps) cfg.step_cap = *a.steps;
  if (cfg.step_cap < 0) throw ConfigError("--steps must be non-negative");
  const auto m = load_gripper(a.gripper);
  const auto scene = load_scene_file(a.scene);
  const auto ctx = adapt::CollisionContext::build(m, cfg.adapt.collision_points, cfg.seed);
  policy::PolicyNet net(cfg.seed, cfg.policy);
  if (!a.checkpoint.empty()) net.load(a.checkpoint);
  std::unique_ptr<adapt::AdaptationNet> anet;
  std::unique_ptr<adapt::Adapter> adapter;
  if (a.adapter == "ob-ik") {
    adapter = std::make_unique<adapt::ObIkAdapter>(m, cfg.solver);
  } else if (a.adapter == "ob-ik-sc") {
    adapter = std::make_unique<adapt::ObIkScAdapter>(m, ctx, cfg.solver, cfg.adapt.omega);
  } else if (a.adapter == "learned") {
    if (a.adapt_checkpoint.empty()) throw ConfigError("--adapter learned needs --adapt-checkpoint");
    anet = std::make_unique<adapt::AdaptationNet>(m, cfg.seed);
    anet->load(a.adapt_checkpoint);
    adapter = std::make_unique<adapt::LearnedAdapter>(m, *anet);
  } else {
    throw ConfigError("unknown adapter '" + a.adapter + "' (expected ob-ik, ob-ik-sc or learned)");
  }
  const Eigen::VectorXd q0 = joint_input(m, a.q);
  const auto base0 = base_input(m, scene, a.base, cfg);
  const auto traj = policy::run_episode(net, *adapter, m, ctx, scene, q0, base0, cfg.episode());
  for (const auto& f : traj.frames) {
    require_finite(f.q, "joint state");
    require_finite(f.action.flat(), "policy action");
  }
  std::ostringstream body;
  policy::write_jsonl(body, traj);
  emit(a.common, body.str(), out);
  if (!a.common.out.empty()) {
    json j = result_envelope("rollout", cfg);
    j["gripper"] = m.name();
    j["adapter"] = adapter->name();
    j["initial"] = {{"q", to_vec(q0)}, {"base", base_json(base0)}};
    j["frames"] = traj.frames.size();
    j["stopped"] = traj.stopped;
    std::vector<Eigen::VectorXd> qs;
    for (const auto& f : traj.frames) qs.push_back(f.q);
    const auto stats = metrics::collision_stats(qs, m, ctx);
    j["collision"] = {{"percentage", stats.percentage}, {"mean_loss", stats.mean_loss_colliding}};
    write_sidecar(a.common.out + ".json", j);
  }
}

struct TrainArgs {
  Common common;
  std::string gripper, checkpoint;
  std::optional<int> updates;
};

void cmd_adapt_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  Config cfg = resolve(a.common);
  if (a.updates) cfg.adapt.updates = *a.updates;
  if (cfg.adapt.updates < 0 || cfg.adapt.updates > cfg.adapt.max_updates)
    throw ConfigError("update budget must lie in [0, " + std::to_string(cfg.adapt.max_updates) + "]");
  const auto m = load_gripper(a.gripper);
  adapt::AdaptationNet net(m, cfg.seed);
  cfg.adapt.log_every = 1000;
  const auto result = adapt::train_adaptation(net, m, cfg.adapt, [&err](int u, double loss) {
    err << "update " << u << " loss " << loss << '\n';
  });
  json env = result_envelope("adapt-train", cfg);
  env["gripper"] = m.name();
  net.save(a.checkpoint, env);
  std::ostringstream csv;
  csv << "update,loss\n" << std::setprecision(17);
  for (std::size_t i = 0; i < result.loss.size(); ++i) csv << i << ',' << result.loss[i] << '\n';
  emit(a.common, csv.str(), out);
  if (!a.common.out.empty()) {
    env["checkpoint"] = a.checkpoint;
    env["updates"] = result.loss.size();
    env["final_loss"] = result.loss.empty() ? 0.0 : result.loss.back();
    write_sidecar(a.common.out + ".json", env);
  }
}

struct EvalArgs {
  Common common;
  std::string gripper, checkpoint, displacements;
  int samples = 200;
};

void cmd_adapt_eval(const EvalArgs& a, std::ostream& out) {
  const Config cfg = resolve(a.common);
  const auto m = load_gripper(a.gripper);
  adapt::AdaptationNet net(m, cfg.seed);
  net.load(a.checkpoint);
  std::vector<adapt::AdaptationSample> samples;
  if (!a.displacements.empty()) {
    std::ifstream in(a.displacements);
    if (!in) throw ConfigError("cannot open " + a.displacements);
    const json j = json::parse(in);
    for (const auto& s : j) {
      adapt::AdaptationSample smp;
      smp.q = from_vec(s.at("q").get<std::vector<double>>());
      smp.dp = from_vec(s.at("dp").get<std::vector<double>>());
      if (smp.q.size() != m.dof() || smp.dp.size() != 6 * m.finger_count())
        throw ConfigError("displacement fixture entry has the wrong size");
      samples.push_back(smp);
    }
  } else {
    if (a.samples < 0) throw ConfigError("--samples must be non-negative");
    samples = adapt::sample_adaptation_set(m, a.samples, cfg.adapt.sigma, cfg.seed + 1);
  }
  const auto ctx = adapt::CollisionContext::build(m, cfg.adapt.collision_points, cfg.seed);
  std::vector<Eigen::VectorXd> configs;
  const auto report = adapt::evaluate_tracking(m, samples, [&](const Eigen::VectorXd& q, const Eigen::VectorXd& dp) {
    const Eigen::VectorXd dj = net.predict(q, model::finger_keypoints(m, q), dp);
    require_finite(dj, "predicted joint change");
    configs.push_back(model::clamp_joints(m, q + dj).q);
    return dj;
  });
  double zero_max = 0.0;
  for (const auto& s : samples) {
    const Eigen::VectorXd dj =
        net.predict(s.q, model::finger_keypoints(m, s.q), Eigen::VectorXd::Zero(6 * m.finger_count()));
    zero_max = std::max(zero_max, dj.norm());
  }
  const auto stats = metrics::collision_stats(configs, m, ctx);
  json j = result_envelope("adapt-eval", cfg);
  j["gripper"] = m.name();
  j["samples"] = samples.size();
  j["tracking"] = {{"mean_error", report.mean_error},
                   {"mean_command", report.mean_command},
                   {"relative", report.relative},
                   {"per_sample", report.per_sample}};
  j["zero_displacement_max_norm"] = zero_max;
  j["collision"] = {{"percentage", stats.percentage}, {"mean_loss", stats.mean_loss_colliding}};
  emit(a.common, j.dump(2) + "\n", out);
}

struct RetargetArgs {
  Common common;
  std::string trajectory, source, target, strategy = "jm", map;
};

void cmd_retarget(const RetargetArgs& a, std::ostream& out) {
  const Config cfg = resolve(a.common);
  const auto src = load_gripper(a.source);
  const auto tgt = load_gripper(a.target);
  std::vector<Eigen::VectorXd> frames;
  for (const auto& row : read_jsonl(a.trajectory)) {
    Eigen::VectorXd q = from_vec(row.at("q").get<std::vector<double>>());
    if (q.size() != src.dof()) throw ConfigError("trajectory frame does not match the source gripper");
    frames.push_back(q);
  }
  retarget::ConfigMap map;
  if (a.strategy == "jm") {
    map = retarget::jm_map(src, tgt, a.map.empty() ? retarget::identity_name_map(src, tgt) : retarget::load_name_map(a.map));
  } else if (a.strategy == "km") {
    map = retarget::km_map(src, tgt, cfg.retarget);
  } else {
    throw ConfigError("unknown strategy '" + a.strategy + "' (expected jm or km)");
  }
  const auto mapped = retarget::mr_pipeline(frames, map, tgt.rest());
  std::ostringstream body;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    require_finite(mapped[i], "retargeted configuration");
    json row = {{"step", i}, {"q", to_vec(mapped[i])}};
    if (a.strategy == "km") {
      const double scale = retarget::default_scale(src, tgt);
      const Eigen::VectorXd goal = scale * retarget::local_keypoints(src, frames[i]);
      const int rows = static_cast<int>(std::min<Eigen::Index>(goal.size(), 6 * tgt.finger_count()));
      row["residual"] = 0.5 * (retarget::local_keypoints(tgt, mapped[i]).head(rows) - goal.head(rows)).squaredNorm();
    }
    body << row.dump() << '\n';
  }
  emit(a.common, body.str(), out);
  if (!a.common.out.empty()) {
    json j = result_envelope("retarget", cfg);
    j["source"] = src.name();
    j["target"] = tgt.name();
    j["strategy"] = a.strategy;
    j["frames"] = mapped.size();
    write_sidecar(a.common.out + ".json", j);
  }
}

struct Q1Args {
  Common common;
  std::string gripper, scene, mesh, grasp, trajectory;
  std::optional<double> mu;
  std::optional<int> cone_edges;
};

void cmd_q1(const Q1Args& a, std::ostream& out) {
  Config cfg = resolve(a.common);
  if (a.mu) cfg.q1.mu = *a.mu;
  if (a.cone_edges) cfg.q1.cone_edges = *a.cone_edges;
  if (cfg.q1.mu < 0.0 || cfg.q1.cone_edges < 3) throw ConfigError("invalid --mu or --cone-edges");
  const auto m = load_gripper(a.gripper);
  geom::Scene scene;
  if (!a.mesh.empty()) {
    try {
      scene.add_mesh(geom::load_obj(a.mesh), geom::Transform::Identity(), true, "object");
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    scene.build();
  } else if (!a.scene.empty()) {
    scene = load_scene_file(a.scene);
  } else {
    throw ConfigError("one of --scene or --mesh is required");
  }
  json grasp;
  if (!a.grasp.empty()) {
    std::ifstream in(a.grasp);
    if (!in) throw ConfigError("cannot open " + a.grasp);
    grasp = json::parse(in);
  } else if (!a.trajectory.empty()) {
    const auto rows = read_jsonl(a.trajectory);
    if (rows.empty()) throw ConfigError("trajectory is empty");
    grasp = rows.back();
  } else {
    throw ConfigError("one of --grasp or --trajectory is required");
  }
  const Eigen::VectorXd q = from_vec(grasp.at("q").get<std::vector<double>>());
  if (q.size() != m.dof()) throw ConfigError("grasp q does not match the gripper");
  const auto base = base_from_json(grasp.at("base"));
  const auto contacts = metrics::detect_contacts(m, q, base, scene, cfg.contact_delta);
  geom::Transform object = geom::Transform::Identity();
  object.translation() = scene.object_center();
  const double rho = std::max(scene.object_radius(), 1e-9);
  const double value = metrics::q1(contacts, object, rho, cfg.q1);
  if (!std::isfinite(value)) throw NumericFailure("Q1 is not finite");
  json j = result_envelope("q1", cfg);
  j["gripper"] = m.name();
  j["q1"] = value;
  j["rho"] = rho;
  j["finger_contacts"] = metrics::finger_contact_count(contacts);
  json cs = json::array();
  for (const auto& c : contacts)
    cs.push_back({{"link", m.links()[c.link].name},
                  {"component", c.component},
                  {"distance", c.distance},
                  {"point", geom::vec3_to_json(c.point)},
                  {"normal", geom::vec3_to_json(c.normal)}});
  j["contacts"] = cs;
  emit(a.common, j.dump(2) + "\n", out);
}

struct CullArgs {
  Common common;
  std::string scene, camera;
};

void cmd_cull(const CullArgs& a) {
  if (a.common.out.empty()) throw ConfigError("cull needs --out for the PLY cloud");
  const Config cfg = resolve(a.common);
  const auto scene = load_scene_file(a.scene);
  geom::Camera cam;
  try {
    cam = geom::load_camera(a.camera);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("camera: ") + e.what());
  }
  const auto cloud = geom::partial_view_cull(scene, cam);
  geom::write_cloud_ply(a.common.out, cloud);
  json j = result_envelope("cull", cfg);
  j["points"] = cloud.size();
  j["foreground_points"] = std::count(cloud.foreground.begin(), cloud.foreground.end(), 1);
  j["camera_eye"] = geom::vec3_to_json(cam.pose.translation());
  write_sidecar(a.common.out + ".json", j);
}

struct BenchArgs {
  Common common;
  std::string gripper, scene, checkpoint, policy_checkpoint;
  std::optional<int> frames;
};

void cmd_bench_adaptation(const BenchArgs& a, std::ostream& out) {
  Config cfg = resolve(a.common);
  if (a.frames) cfg.bench.frames = *a.frames;
  if (cfg.bench.frames < 0) throw ConfigError("--frames must be non-negative");
  const auto m = load_gripper(a.gripper);
  const auto scene = load_scene_file(a.scene);
  const auto ctx = adapt::CollisionContext::build(m, cfg.adapt.collision_points, cfg.seed);
  adapt::AdaptationNet anet(m, cfg.seed);
  if (!a.checkpoint.empty()) anet.load(a.checkpoint);
  policy::PolicyNet net(cfg.seed, cfg.policy);
  if (!a.policy_checkpoint.empty()) net.load(a.policy_checkpoint);
  adapt::LearnedAdapter learned(m, anet);
  adapt::ObIkAdapter obik(m, cfg.solver);
  adapt::ObIkScAdapter obiksc(m, ctx, cfg.solver, cfg.adapt.omega);
  const auto frames = make_bench_frames(m, scene, net, cfg, cfg.bench.frames);
  const auto rows = bench_adaptation(m, ctx, frames, {&learned, &obik, &obiksc}, cfg.bench);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  emit(a.common, csv.str(), out);
  if (!a.common.out.empty()) {
    json j = result_envelope("bench-adaptation", cfg);
    j["gripper"] = m.name();
    j["learned_checkpoint"] = a.checkpoint.empty() ? json(nullptr) : json(a.checkpoint);
    j["rows"] = bench_json(rows);
    write_sidecar(a.common.out + ".json", j);
  }
}

struct ReprArgs {
  Common common;
  std::string gripper;
  std::vector<std::string> scenes, representations = {"ibs", "ocm", "gcm"};
  std::optional<int> frames;
};

void cmd_bench_repr(const ReprArgs& a, std::ostream& out) {
  Config cfg = resolve(a.common);
  const int frames = a.frames.value_or(std::max(cfg.bench.frames / 4, 1));
  if (frames < 0) throw ConfigError("--frames must be non-negative");
  const auto m = load_gripper(a.gripper);
  std::vector<Representation> reps;
  for (const auto& r : a.representations) reps.push_back(parse_representation(r));
  std::vector<ReprRow> rows;
  for (const auto& path : a.scenes) {
    const auto scene = load_scene_file(path);
    const std::string name = std::filesystem::path(path).stem().string();
    for (auto r : reps) rows.push_back(bench_representation(m, scene, name, r, cfg, frames));
  }
  std::ostringstream csv;
  write_repr_csv(csv, rows);
  emit(a.common, csv.str(), out);
  if (!a.common.out.empty()) {
    json j = result_envelope("bench-repr", cfg);
    j["gripper"] = m.name();
    j["scenes"] = a.scenes;
    write_sidecar(a.common.out + ".json", j);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gripper-agnostic grasping toolkit"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  FkArgs fk;
  auto* fk_cmd = app.add_subcommand("fk", "forward kinematics and keypoint state");
  add_common(fk_cmd, fk.common);
  fk_cmd->add_option("--gripper", fk.gripper, "gripper spec")->required();
  fk_cmd->add_option("--q", fk.q, "comma-separated joint values (rest when omitted)");
  fk_cmd->add_option("--base", fk.base, "tx,ty,tz,rx,ry,rz (identity when omitted)");

  IbsArgs ib;
  auto* ibs_cmd = app.add_subcommand("ibs", "sample the interaction bisector surface to a PLY file");
  add_common(ibs_cmd, ib.common);
  ibs_cmd->add_option("--gripper", ib.gripper, "gripper spec")->required();
  ibs_cmd->add_option("--scene", ib.scene, "scene description");
  ibs_cmd->add_option("--cloud", ib.cloud, "segmented point cloud (PLY) used instead of a scene");
  ibs_cmd->add_option("--camera", ib.camera, "camera that produced --cloud (orients normals)");
  ibs_cmd->add_option("--q", ib.q, "comma-separated joint values");
  ibs_cmd->add_option("--base", ib.base, "tx,ty,tz,rx,ry,rz (sampled from the seed when omitted)");

  RolloutArgs ro;
  auto* ro_cmd = app.add_subcommand("rollout", "kinematic policy rollout as JSON lines");
  add_common(ro_cmd, ro.common);
  ro_cmd->add_option("--gripper", ro.gripper, "gripper spec")->required();
  ro_cmd->add_option("--scene", ro.scene, "scene description")->required();
  ro_cmd->add_option("--checkpoint", ro.checkpoint, "policy checkpoint (seeded initialisation when omitted)");
  ro_cmd->add_option("--adapter", ro.adapter, "ob-ik, ob-ik-sc or learned");
  ro_cmd->add_option("--adapt-checkpoint", ro.adapt_checkpoint, "adaptation checkpoint for --adapter learned");
  ro_cmd->add_option("--steps", ro.steps, "step cap");
  ro_cmd->add_option("--q", ro.q, "initial joint values");
  ro_cmd->add_option("--base", ro.base, "initial base pose tx,ty,tz,rx,ry,rz");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("adapt-train", "train an adaptation net; loss curve as CSV");
  add_common(tr_cmd, tr.common);
  tr_cmd->add_option("--gripper", tr.gripper, "gripper spec")->required();
  tr_cmd->add_option("--checkpoint", tr.checkpoint, "checkpoint to write")->required();
  tr_cmd->add_option("--updates", tr.updates, "update budget");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("adapt-eval", "tracking error and collision statistics of an adaptation net");
  add_common(ev_cmd, ev.common);
  ev_cmd->add_option("--gripper", ev.gripper, "gripper spec")->required();
  ev_cmd->add_option("--checkpoint", ev.checkpoint, "adaptation checkpoint")->required();
  ev_cmd->add_option("--displacements", ev.displacements, "JSON list of {q, dp} inputs");
  ev_cmd->add_option("--samples", ev.samples, "held-out samples drawn when no fixture is given");

  RetargetArgs rt;
  auto* rt_cmd = app.add_subcommand("retarget", "map a source trajectory onto another gripper");
  add_common(rt_cmd, rt.common);
  rt_cmd->add_option("--trajectory", rt.trajectory, "source trajectory (JSON lines with q)")->required();
  rt_cmd->add_option("--source", rt.source, "source gripper spec")->required();
  rt_cmd->add_option("--target", rt.target, "target gripper spec")->required();
  rt_cmd->add_option("--strategy", rt.strategy, "jm or km");
  rt_cmd->add_option("--map", rt.map, "joint name map (jm; shared names when omitted)");

  Q1Args qa;
  auto* q1_cmd = app.add_subcommand("q1", "contacts and Q1 of a grasp");
  add_common(q1_cmd, qa.common);
  q1_cmd->add_option("--gripper", qa.gripper, "gripper spec")->required();
  q1_cmd->add_option("--scene", qa.scene, "scene description");
  q1_cmd->add_option("--mesh", qa.mesh, "object mesh (OBJ, world frame)");
  q1_cmd->add_option("--grasp", qa.grasp, "JSON with q and base");
  q1_cmd->add_option("--trajectory", qa.trajectory, "rollout JSON lines; the last frame is scored");
  q1_cmd->add_option("--mu", qa.mu, "friction coefficient");
  q1_cmd->add_option("--cone-edges", qa.cone_edges, "friction cone edges");

  CullArgs cu;
  auto* cu_cmd = app.add_subcommand("cull", "partial-view point cloud of a scene");
  add_common(cu_cmd, cu.common);
  cu_cmd->add_option("--scene", cu.scene, "scene description")->required();
  cu_cmd->add_option("--camera", cu.camera, "camera JSON")->required();

  BenchArgs be;
  auto* be_cmd = app.add_subcommand("bench-adaptation", "per-stage timing of learned and optimisation adaptation");
  add_common(be_cmd, be.common);
  be_cmd->add_option("--gripper", be.gripper, "gripper spec")->required();
  be_cmd->add_option("--scene", be.scene, "scene description")->required();
  be_cmd->add_option("--checkpoint", be.checkpoint, "adaptation checkpoint for the learned method");
  be_cmd->add_option("--policy-checkpoint", be.policy_checkpoint, "policy checkpoint");
  be_cmd->add_option("--frames", be.frames, "frame count");

  ReprArgs re;
  auto* re_cmd = app.add_subcommand("bench-repr", "feature extraction timing per representation");
  add_common(re_cmd, re.common);
  re_cmd->add_option("--gripper", re.gripper, "gripper spec")->required();
  re_cmd->add_option("--scene", re.scenes, "scene description (repeatable)")->required();
  re_cmd->add_option("--representation", re.representations, "ibs, ocm and/or gcm");
  re_cmd->add_option("--frames", re.frames, "frames per scene");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (fk_cmd->parsed()) cmd_fk(fk, out);
    else if (ibs_cmd->parsed()) cmd_ibs(ib);
    else if (ro_cmd->parsed()) cmd_rollout(ro, out);
    else if (tr_cmd->parsed()) cmd_adapt_train(tr, out, err);
    else if (ev_cmd->parsed()) cmd_adapt_eval(ev, out);
    else if (rt_cmd->parsed()) cmd_retarget(rt, out);
    else if (q1_cmd->parsed()) cmd_q1(qa, out);
    else if (cu_cmd->parsed()) cmd_cull(cu);
    else if (be_cmd->parsed()) cmd_bench_adaptation(be, out);
    else if (re_cmd->parsed()) cmd_bench_repr(re, out);
  } catch (const ibs::NoIbsError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const adapt::DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const NumericFailure& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace dexgrasp::harness
