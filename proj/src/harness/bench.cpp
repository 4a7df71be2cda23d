#include "dexgrasp/harness/bench.hpp"

#include "dexgrasp/geom/gripper_queries.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>

namespace dexgrasp::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::VectorXd mid_range_q(const model::GripperModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.25, 0.75);
  Eigen::VectorXd q(model.dof());
  for (int i = 0; i < model.dof(); ++i) q[i] = model.lower()[i] + u(rng) * (model.upper()[i] - model.lower()[i]);
  return q;
}

}  // namespace

double robust_ms(const std::vector<double>& samples, int warmup, int batches) {
  const int n = static_cast<int>(samples.size());
  const int skip = std::min(std::max(warmup, 0), n > 1 ? n - 1 : 0);
  const int m = n - skip;
  if (m <= 0) return 0.0;
  const int b = std::clamp(batches, 1, m);
  std::vector<double> means;
  for (int i = 0; i < b; ++i) {
    const int lo = skip + m * i / b, hi = skip + m * (i + 1) / b;
    double s = 0.0;
    for (int k = lo; k < hi; ++k) s += samples[k];
    means.push_back(s / (hi - lo));
  }
  return median(means);
}

std::vector<BenchFrame> make_bench_frames(const model::GripperModel& model, const geom::Scene& scene,
                                          const policy::PolicyNet& net, const Config& cfg, int count) {
  std::vector<BenchFrame> frames;
  if (count <= 0) return frames;
  const auto poses = geom::sample_initial_poses(model, scene.object_center(), count, cfg.seed, cfg.initial_radius);
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
  for (int i = 0; i < count; ++i) {
    BenchFrame f;
    f.q = mid_range_q(model, rng);
    f.base = poses[i];
    frames.push_back(f);
  }
  for (int w = 0; w < cfg.bench.warmup; ++w) {
    const auto& f = frames[w % count];
    net.act(policy::observe(scene, model, f.q, f.base, cfg.ibs));
  }
  for (auto& f : frames) {
    const auto t0 = Clock::now();
    const auto obs = policy::observe(scene, model, f.q, f.base, cfg.ibs);
    f.features_ms = ms_since(t0);
    const auto t1 = Clock::now();
    const auto action = net.act(obs);
    f.prediction_ms = ms_since(t1);
    f.dp = action.keypoint_displacements();
    f.ibs_points = obs.cloud.survivors;
  }
  return frames;
}

std::vector<BenchRow> bench_adaptation(const model::GripperModel& model, const adapt::CollisionContext& ctx,
                                       const std::vector<BenchFrame>& frames,
                                       const std::vector<adapt::Adapter*>& adapters, const BenchConfig& bench) {
  std::vector<BenchRow> rows;
  if (frames.empty()) return rows;
  const int n = static_cast<int>(frames.size());
  std::vector<double> features, prediction;
  for (const auto& f : frames) {
    features.push_back(f.features_ms);
    prediction.push_back(f.prediction_ms);
  }
  for (auto* adapter : adapters) {
    for (int w = 0; w < bench.warmup; ++w) adapter->adapt(frames[w % n].q, frames[w % n].dp);
    std::vector<double> times;
    std::vector<Eigen::VectorXd> configs;
    for (const auto& f : frames) {
      const auto t0 = Clock::now();
      const Eigen::VectorXd dj = adapter->adapt(f.q, f.dp);
      times.push_back(ms_since(t0));
      configs.push_back(model::clamp_joints(model, f.q + dj).q);
    }
    BenchRow row;
    row.method = adapter->name();
    row.frames = n;
    // features and prediction were timed after their own warm-up
    row.features_ms = robust_ms(features, 0, bench.batches);
    row.prediction_ms = robust_ms(prediction, 0, bench.batches);
    row.adaptation_ms = robust_ms(times, 0, bench.batches);
    row.total_ms = row.features_ms + row.prediction_ms + row.adaptation_ms;
    const auto stats = metrics::collision_stats(configs, model, ctx);
    row.collision_percentage = stats.percentage;
    row.collision_loss = stats.mean_loss_colliding;
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "method,frames,feature_extraction_ms,unified_prediction_ms,adaptation_ms,total_ms,collision_percentage,"
         "collision_loss\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.method << ',' << r.frames << ',' << r.features_ms << ',' << r.prediction_ms << ',' << r.adaptation_ms
        << ',' << r.total_ms << ',' << r.collision_percentage << ',' << r.collision_loss << '\n';
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"method", r.method},
                   {"frames", r.frames},
                   {"feature_extraction_ms", r.features_ms},
                   {"unified_prediction_ms", r.prediction_ms},
                   {"adaptation_ms", r.adaptation_ms},
                   {"total_ms", r.total_ms},
                   {"collision_percentage", r.collision_percentage},
                   {"collision_loss", r.collision_loss}});
  return out;
}

Representation parse_representation(const std::string& name) {
  if (name == "ibs") return Representation::Ibs;
  if (name == "ocm") return Representation::Ocm;
  if (name == "gcm") return Representation::Gcm;
  throw ConfigError("unknown representation '" + name + "' (expected ibs, ocm or gcm)");
}

std::string representation_name(Representation r) {
  switch (r) {
    case Representation::Ibs: return "ibs";
    case Representation::Ocm: return "ocm";
    case Representation::Gcm: return "gcm";
  }
  return "";
}

ReprRow bench_representation(const model::GripperModel& model, const geom::Scene& scene, const std::string& scene_name,
                             Representation rep, const Config& cfg, int frames) {
  ReprRow row;
  row.representation = representation_name(rep);
  row.scene = scene_name;
  if (frames <= 0) return row;
  const auto poses = geom::sample_initial_poses(model, scene.object_center(), frames, cfg.seed, cfg.initial_radius);
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
  std::vector<double> times;
  double points = 0.0, survivors = 0.0, distance = 0.0;
  int ok = 0;
  for (int i = 0; i < frames; ++i) {
    const Eigen::VectorXd q = mid_range_q(model, rng);
    const auto t0 = Clock::now();
    if (rep == Representation::Ibs) {
      try {
        const auto cloud = ibs::sample_ibs(scene, model, q, poses[i], cfg.ibs);
        times.push_back(ms_since(t0));
        points += cloud.size();
        survivors += cloud.survivors;
        double d = 0.0;
        for (const auto& p : cloud.points) d += p.d_s;
        distance += d / cloud.size();
        ++ok;
      } catch (const ibs::NoIbsError&) {
        times.push_back(ms_since(t0));
        ++row.failures;
      }
      continue;
    }
    const auto map = rep == Representation::Ocm
                         ? ibs::extract_ocm(scene, model, q, poses[i], cfg.ibs.output_size, cfg.seed + i)
                         : ibs::extract_gcm(scene, model, q, poses[i], cfg.ibs.output_size, cfg.seed + i);
    times.push_back(ms_since(t0));
    points += map.features.rows();
    distance += map.features.rows() > 0 ? map.features.col(3).mean() : 0.0;
    ++ok;
  }
  row.frames = frames;
  row.extract_ms = robust_ms(times, std::min(cfg.bench.warmup, frames - 1), cfg.bench.batches);
  if (ok > 0) {
    row.mean_points = points / ok;
    row.mean_survivors = survivors / ok;
    row.mean_distance = distance / ok;
  }
  return row;
}

void write_repr_csv(std::ostream& out, const std::vector<ReprRow>& rows) {
  out << "representation,scene,frames,failures,extract_ms,mean_points,mean_survivors,mean_distance\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.representation << ',' << r.scene << ',' << r.frames << ',' << r.failures << ',' << r.extract_ms << ','
        << r.mean_points << ',' << r.mean_survivors << ',' << r.mean_distance << '\n';
}

}  // namespace dexgrasp::harness
