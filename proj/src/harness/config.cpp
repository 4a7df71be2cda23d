#include "dexgrasp/harness/config.hpp"

#include <fstream>
#include <set>

namespace dexgrasp::harness {

const char* toolkit_version() { return DEXGRASP_VERSION; }

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw ConfigError("config section '" + name + "' must be an object");
  }

  template <class T>
  void read(const std::string& key, T& field) {
    known_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      field = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config " + name_ + "." + key + " has the wrong type");
    }
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items())
      if (!known_.count(key)) throw ConfigError("unknown config key " + name_ + "." + key);
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

}  // namespace

void Config::apply_seed(std::uint64_t s) {
  seed = s;
  ibs.seed = s;
  adapt.seed = s;
}

policy::EpisodeConfig Config::episode() const {
  policy::EpisodeConfig e;
  e.step_cap = step_cap;
  e.ibs = ibs;
  e.contact_delta = contact_delta;
  return e;
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> sections = {"seed",    "ibs",     "policy",  "adapt", "solver",
                                                 "metrics", "episode", "retarget", "bench"};
  for (const auto& [key, value] : j.items())
    if (!sections.count(key)) throw ConfigError("unknown config section '" + key + "'");

  Config c;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }

  Section ibs(j, "ibs");
  ibs.read("sphere_radius", c.ibs.sphere_radius);
  ibs.read("voxel_resolution", c.ibs.voxel_resolution);
  ibs.read("tau", c.ibs.tau);
  ibs.read("refine_iterations", c.ibs.refine_iterations);
  ibs.read("refine_tolerance", c.ibs.refine_tolerance);
  ibs.read("output_size", c.ibs.output_size);
  ibs.finish();

  Section pol(j, "policy");
  pol.read("width", c.policy.attention.width);
  pol.read("heads", c.policy.attention.heads);
  pol.read("ff_width", c.policy.attention.ff_width);
  pol.read("layers", c.policy.layers);
  pol.read("point_cap", c.policy.point_cap);
  pol.read("rotation_cap", c.policy.rotation_cap);
  pol.finish();

  Section ad(j, "adapt");
  ad.read("updates", c.adapt.updates);
  ad.read("batch", c.adapt.batch);
  ad.read("sigma", c.adapt.sigma);
  ad.read("omega", c.adapt.omega);
  ad.read("lr", c.adapt.lr);
  ad.read("final_lr", c.adapt.final_lr);
  ad.read("collision_points", c.adapt.collision_points);
  ad.read("max_updates", c.adapt.max_updates);
  ad.finish();

  Section so(j, "solver");
  so.read("iterations", c.solver.iterations);
  so.read("step", c.solver.step);
  so.read("max_halvings", c.solver.max_halvings);
  so.read("scale_by_jacobian", c.solver.scale_by_jacobian);
  so.finish();

  Section me(j, "metrics");
  me.read("mu", c.q1.mu);
  me.read("cone_edges", c.q1.cone_edges);
  me.read("torsion", c.q1.torsion);
  me.read("contact_delta", c.contact_delta);
  me.finish();

  Section ep(j, "episode");
  ep.read("step_cap", c.step_cap);
  ep.read("initial_radius", c.initial_radius);
  ep.finish();

  Section rt(j, "retarget");
  rt.read("iterations", c.retarget.iterations);
  rt.read("step", c.retarget.step);
  rt.read("damping", c.retarget.damping);
  rt.finish();

  Section be(j, "bench");
  be.read("frames", c.bench.frames);
  be.read("warmup", c.bench.warmup);
  be.read("batches", c.bench.batches);
  be.finish();

  try {
    c.ibs.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require(c.policy.attention.width > 0 && c.policy.attention.heads > 0 &&
              c.policy.attention.width % c.policy.attention.heads == 0,
          "policy.width must be a positive multiple of policy.heads");
  require(c.policy.layers >= 0 && c.policy.attention.ff_width > 0, "policy layer sizes must be positive");
  require(c.adapt.updates >= 0 && c.adapt.batch > 0 && c.adapt.sigma >= 0.0 && c.adapt.lr > 0.0,
          "adapt budget, batch, sigma and lr must be non-negative (batch and lr positive)");
  require(c.solver.iterations >= 0 && c.solver.step > 0.0 && c.solver.max_halvings >= 0, "invalid solver settings");
  require(c.q1.mu >= 0.0 && c.q1.cone_edges >= 3 && c.q1.torsion >= 0.0, "invalid Q1 settings");
  require(c.contact_delta >= 0.0, "metrics.contact_delta must be non-negative");
  require(c.step_cap >= 0 && c.initial_radius > 0.0, "invalid episode settings");
  require(c.retarget.iterations >= 0 && c.retarget.step > 0.0 && c.retarget.damping >= 0.0,
          "invalid retarget settings");
  require(c.bench.frames >= 0 && c.bench.warmup >= 0 && c.bench.batches > 0, "invalid bench settings");
  c.apply_seed(c.seed);
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const Config& c) {
  return {
      {"seed", c.seed},
      {"ibs",
       {{"sphere_radius", c.ibs.sphere_radius},
        {"voxel_resolution", c.ibs.voxel_resolution},
        {"tau", c.ibs.threshold()},
        {"refine_iterations", c.ibs.refine_iterations},
        {"refine_tolerance", c.ibs.refine_tolerance},
        {"output_size", c.ibs.output_size}}},
      {"policy",
       {{"width", c.policy.attention.width},
        {"heads", c.policy.attention.heads},
        {"ff_width", c.policy.attention.ff_width},
        {"layers", c.policy.layers},
        {"point_cap", c.policy.point_cap},
        {"rotation_cap", c.policy.rotation_cap}}},
      {"adapt",
       {{"updates", c.adapt.updates},
        {"batch", c.adapt.batch},
        {"sigma", c.adapt.sigma},
        {"omega", c.adapt.omega},
        {"lr", c.adapt.lr},
        {"final_lr", c.adapt.final_lr},
        {"collision_points", c.adapt.collision_points},
        {"max_updates", c.adapt.max_updates}}},
      {"solver",
       {{"iterations", c.solver.iterations},
        {"step", c.solver.step},
        {"max_halvings", c.solver.max_halvings},
        {"scale_by_jacobian", c.solver.scale_by_jacobian}}},
      {"metrics",
       {{"mu", c.q1.mu}, {"cone_edges", c.q1.cone_edges}, {"torsion", c.q1.torsion}, {"contact_delta", c.contact_delta}}},
      {"episode", {{"step_cap", c.step_cap}, {"initial_radius", c.initial_radius}}},
      {"retarget", {{"iterations", c.retarget.iterations}, {"step", c.retarget.step}, {"damping", c.retarget.damping}}},
      {"bench", {{"frames", c.bench.frames}, {"warmup", c.bench.warmup}, {"batches", c.bench.batches}}},
  };
}

json result_envelope(const std::string& command, const Config& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"toolkit_version", toolkit_version()},
          {"command", command},
          {"config", config_to_json(cfg)}};
}

}  // namespace dexgrasp::harness
