#pragma once

#include "dexgrasp/adapt/net.hpp"
#include "dexgrasp/adapt/solvers.hpp"
#include "dexgrasp/ibs/ibs.hpp"
#include "dexgrasp/metrics/metrics.hpp"
#include "dexgrasp/policy/episode.hpp"
#include "dexgrasp/retarget/retarget.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace dexgrasp::harness {

inline constexpr int kSchemaVersion = 1;
const char* toolkit_version();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  int frames = 40;
  int warmup = 10;
  int batches = 5;
};

/// Every tunable of the toolkit, grouped by module.
struct Config {
  std::uint64_t seed = 0;
  ibs::IbsParams ibs;
  policy::PolicyConfig policy;
  adapt::TrainConfig adapt;
  adapt::SolverOptions solver;
  metrics::Q1Params q1;
  double contact_delta = 0.002;
  int step_cap = 50;
  double initial_radius = 0.12;  // distance of sampled initial poses from the object centre
  retarget::KmOptions retarget;
  BenchConfig bench;

  /// Copies the seed into the per-module seeds.
  void apply_seed(std::uint64_t s);
  policy::EpisodeConfig episode() const;
};

/// Reads sections over the defaults; unknown sections or keys are errors.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const Config& cfg);

/// Result envelope: schema version, toolkit version, command and resolved config.
nlohmann::json result_envelope(const std::string& command, const Config& cfg);

}  // namespace dexgrasp::harness
