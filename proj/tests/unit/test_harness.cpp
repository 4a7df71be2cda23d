#include "dexgrasp/harness/bench.hpp"
#include "dexgrasp/harness/cli.hpp"

#include "oracles/fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dexgrasp;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dexgrasp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = harness::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& rel) { return testing::fixture(rel).string(); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "dexgrasp_harness_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config defaults, overrides and errors") {
  const auto def = harness::config_from_json(json::object());
  CHECK(def.ibs.output_size == 4096);
  CHECK(def.ibs.voxel_resolution == 20);
  CHECK(def.ibs.sphere_radius == 0.18);
  CHECK(def.adapt.omega == 1.0);
  CHECK(def.solver.iterations == 100);

  const auto cfg = harness::config_from_json(json::parse(R"({"seed": 7, "ibs": {"output_size": 512}, "metrics": {"mu": 0.3}})"));
  CHECK(cfg.ibs.output_size == 512);
  CHECK(cfg.ibs.seed == 7);
  CHECK(cfg.adapt.seed == 7);
  CHECK(cfg.q1.mu == 0.3);

  const json echoed = harness::config_to_json(cfg);
  CHECK(harness::config_to_json(harness::config_from_json(echoed)) == echoed);

  CHECK_THROWS_AS(harness::config_from_json(json::parse(R"({"ibs": {"voxels": 3}})")), harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(json::parse(R"({"physics": {}})")), harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(json::parse(R"({"ibs": {"output_size": "many"}})")), harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(json::parse(R"({"policy": {"width": 30, "heads": 4}})")),
                  harness::ConfigError);
}

TEST_CASE("result envelope") {
  const auto env = harness::result_envelope("fk", harness::Config{});
  CHECK(env.at("schema_version") == harness::kSchemaVersion);
  CHECK(env.at("toolkit_version") == std::string(harness::toolkit_version()));
  CHECK(env.at("config").contains("ibs"));
}

TEST_CASE("median of batch means") {
  const std::vector<double> samples = {100, 100, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // batches after two warm-up samples: {1,2}, {3,4}, {5,6}, {7,8}, {9,10}
  CHECK(harness::robust_ms(samples, 2, 5) == doctest::Approx(5.5));
  CHECK(harness::robust_ms({4.0, 8.0}, 0, 2) == doctest::Approx(6.0));
  CHECK(harness::robust_ms({}, 10, 5) == 0.0);
  CHECK(harness::robust_ms({3.0}, 10, 5) == 3.0);
}

TEST_CASE("bench with zero frames is empty") {
  const auto hand = testing::load_hand("planar2");
  const auto ctx = adapt::CollisionContext::build(hand);
  adapt::ObIkAdapter obik(hand);
  CHECK(harness::bench_adaptation(hand, ctx, {}, {&obik}, {}).empty());
  std::ostringstream csv;
  harness::write_bench_csv(csv, {});
  CHECK(csv.str() ==
        "method,frames,feature_extraction_ms,unified_prediction_ms,adaptation_ms,total_ms,collision_percentage,"
        "collision_loss\n");
}

TEST_CASE("cli exit codes") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == harness::kConfigError);
  CHECK(cli({"fk"}).code == harness::kConfigError);
  CHECK(cli({"fk", "--gripper", "/nonexistent.json"}).code == harness::kConfigError);
  CHECK(cli({"fk", "--gripper", fixture("grippers/planar2.json"), "--q", "1,2"}).code == harness::kConfigError);
  const auto bad = scratch("bad_config.json");
  std::ofstream(bad) << R"({"ibs": {"bogus": 1}})";
  CHECK(cli({"fk", "--gripper", fixture("grippers/planar2.json"), "--config", bad.string()}).code ==
        harness::kConfigError);
  const auto far = cli({"ibs", "--gripper", fixture("grippers/spatial3.json"), "--scene",
                        fixture("scenes/sphere_table.json"), "--base", "0,0,3,0,0,0", "--out",
                        scratch("far.ply").string()});
  CHECK(far.code == harness::kNumericFailure);
  CHECK(far.err.find("no IBS in range") != std::string::npos);
}

TEST_CASE("fk command reports the planar tip") {
  const auto r = cli({"fk", "--gripper", fixture("grippers/planar2.json")});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("schema_version") == harness::kSchemaVersion);
  CHECK(j.at("keypoint_state").size() == 18);
  CHECK(j.at("links").size() == testing::load_hand("planar2").links().size());
}

TEST_CASE("bench-adaptation with zero frames") {
  const auto path = scratch("bench0.csv");
  const auto r = cli({"bench-adaptation", "--gripper", fixture("grippers/planar2.json"), "--scene",
                      fixture("scenes/sphere_table.json"), "--frames", "0", "--out", path.string()});
  CHECK(r.code == 0);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  CHECK(header.rfind("method,", 0) == 0);
  CHECK_FALSE(std::getline(in, row));
  const auto meta = json::parse(std::ifstream(path.string() + ".json"));
  CHECK(meta.at("rows").empty());
}

TEST_CASE("seeded commands repeat exactly") {
  const std::vector<std::string> args = {"rollout", "--gripper", fixture("grippers/planar2.json"), "--scene",
                                         fixture("scenes/sphere_table.json"), "--steps", "2", "--seed", "4"};
  const auto a = cli(args), b = cli(args);
  REQUIRE(a.code == 0);
  auto strip = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
      auto j = json::parse(line);
      j.erase("timings");
      out += j.dump() + "\n";
    }
    return out;
  };
  CHECK(strip(a.out) == strip(b.out));
  CHECK_FALSE(strip(a.out).empty());
}
