#include "dexgrasp/ibs/ibs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dexgrasp::ibs {

double IbsParams::threshold() const { return tau > 0.0 ? tau : std::sqrt(3.0) * cell() / 2.0; }

double IbsParams::accept_tolerance() const { return std::max(threshold() / 10.0, 1e-3); }

void IbsParams::validate() const {
  if (voxel_resolution < 2) throw std::invalid_argument("ibs: voxel_resolution must be >= 2");
  if (output_size < 1) throw std::invalid_argument("ibs: output_size must be >= 1");
  if (!(sphere_radius > 0.0)) throw std::invalid_argument("ibs: sphere_radius must be positive");
  if (tau < 0.0) throw std::invalid_argument("ibs: tau must be positive");
  if (refine_iterations < 0) throw std::invalid_argument("ibs: refine_iterations must be >= 0");
}

Eigen::MatrixXd IbsFeatureCloud::features() const {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()), feature_dim());
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const IbsPoint& p = points[i];
    f.block<1, 3>(i, 0) = p.c.transpose();
    f(i, 3) = p.d_s;
    f(i, 4) = p.d_g;
    f(i, 5) = p.b_s;
    f(i, 6 + p.component) = 1.0;
    f(i, 6 + component_count) = p.a_g;
  }
  return f;
}

IbsPoint featurize_point(const geom::Scene& scene, const geom::PosedGripper& gripper, const Vec3& p) {
  const auto& model = gripper.model();
  const geom::ClosestHit hs = scene.closest(p);
  const geom::ClosestHit hg = gripper.closest(p);
  IbsPoint out;
  out.world = p;
  out.c = gripper.palm().inverse() * p;
  out.d_s = hs.distance;
  out.d_g = hg.distance;
  out.b_s = hs.source > 0 ? 1 : 0;
  if (hg.valid()) {
    const auto& link = model.links()[hg.source];
    out.component = link.component;
    const Vec3 rest_normal = model.rest_frames()[hg.source].linear() * link.bvh.normal(hg.primitive);
    out.a_g = std::clamp(rest_normal.dot(model.d_up().normalized()), -1.0, 1.0);
  }
  return out;
}

namespace {

// Moves p toward the bisector; returns false if the two closest points coincide.
bool refine(const geom::Scene& scene, const geom::PosedGripper& gripper, Vec3& p, const IbsParams& params) {
  for (int it = 0; it < params.refine_iterations; ++it) {
    const geom::ClosestHit hs = scene.closest(p);
    const geom::ClosestHit hg = gripper.closest(p);
    const double err = hg.distance - hs.distance;
    if (std::abs(err) < params.refine_tolerance) return true;
    const Vec3 u = hg.point - hs.point;
    const double len = u.norm();
    if (len < 1e-12) return false;
    p += 0.5 * err * (u / len);
  }
  return true;
}

}  // namespace

std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int count, int start) {
  const int n = static_cast<int>(points.size());
  std::vector<int> chosen;
  if (n == 0 || count <= 0) return chosen;
  count = std::min(count, n);
  chosen.reserve(count);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  int cur = std::clamp(start, 0, n - 1);
  for (int s = 0; s < count; ++s) {
    chosen.push_back(cur);
    int next = 0;
    double far = -1.0;
    for (int i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], (points[i] - points[cur]).squaredNorm());
      // relative slack so round-off cannot reorder symmetric ties
      if (dist[i] > far + 1e-9 * std::max(far, 1e-12)) {
        far = dist[i];
        next = i;
      }
    }
    cur = next;
  }
  return chosen;
}

IbsFeatureCloud sample_ibs(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                           const model::BasePose& base, const IbsParams& params) {
  params.validate();
  const geom::PosedGripper gripper(model, q, base);
  const Transform palm = gripper.palm();
  const int v = params.voxel_resolution;
  const double r = params.sphere_radius;
  const double cell = params.cell();
  const double tau = params.threshold();

  auto index = [v](int i, int j, int k) { return (i * v + j) * v + k; };
  auto local_center = [&](int i, int j, int k) {
    return Vec3((i + 0.5) * cell - r, (j + 0.5) * cell - r, (k + 0.5) * cell - r);
  };

  std::vector<double> diff(static_cast<std::size_t>(v) * v * v);
  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j)
      for (int k = 0; k < v; ++k) {
        const Vec3 p = palm * local_center(i, j, k);
        diff[index(i, j, k)] = scene.closest(p).distance - gripper.closest(p).distance;
      }

  std::vector<Vec3> survivors;
  std::vector<IbsPoint> features;
  const double accept = params.accept_tolerance();
  auto try_add = [&](Vec3 p) {
    if (!refine(scene, gripper, p, params)) return false;
    IbsPoint f = featurize_point(scene, gripper, p);
    if (std::abs(f.d_s - f.d_g) > accept) return false;
    survivors.push_back(p);
    features.push_back(f);
    return true;
  };

  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j)
      for (int k = 0; k < v; ++k) {
        const Vec3 local = local_center(i, j, k);
        const double d = diff[index(i, j, k)];
        if (local.norm() > r || std::abs(d) >= tau) continue;
        bool crossing = false;
        for (int di = -1; di <= 1 && !crossing; ++di)
          for (int dj = -1; dj <= 1 && !crossing; ++dj)
            for (int dk = -1; dk <= 1 && !crossing; ++dk) {
              const int a = i + di, b = j + dj, c = k + dk;
              if (a < 0 || b < 0 || c < 0 || a >= v || b >= v || c >= v) continue;
              crossing = (diff[index(a, b, c)] > 0.0) != (d > 0.0);
            }
        if (crossing) try_add(palm * local);
      }

  if (survivors.empty()) throw NoIbsError();

  IbsFeatureCloud cloud;
  cloud.component_count = model.component_count();
  cloud.palm = palm;
  cloud.base = base;
  cloud.survivors = static_cast<int>(survivors.size());

  std::mt19937_64 rng(params.seed);
  const int n = params.output_size;
  const int m = static_cast<int>(survivors.size());
  if (m >= n) {
    const int start = std::uniform_int_distribution<int>(0, m - 1)(rng);
    for (int idx : farthest_point_sample(survivors, n, start)) cloud.points.push_back(features[idx]);
    return cloud;
  }

  cloud.points = features;
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::normal_distribution<double> jitter(0.0, cell / 10.0);
  while (static_cast<int>(cloud.points.size()) < n) {
    const int src = pick(rng);
    const Vec3 p = survivors[src] + Vec3(jitter(rng), jitter(rng), jitter(rng));
    const std::size_t before = features.size();
    if (try_add(p)) {
      cloud.points.push_back(features.back());
      survivors.resize(before);
      features.resize(before);
    } else {
      cloud.points.push_back(features[src]);
    }
  }
  return cloud;
}

namespace {

Eigen::RowVectorXd one_hot(int index, int size) {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(size);
  v[index] = 1.0;
  return v;
}

}  // namespace

ContactMap extract_ocm(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                       const model::BasePose& base, int n, std::uint64_t seed) {
  const geom::PosedGripper gripper(model, q, base);
  const int k1 = model.component_count();
  std::mt19937_64 rng(seed);
  std::vector<Vec3> samples;
  const geom::Mesh object = scene.foreground_mesh();
  if (!object.empty()) {
    samples = geom::sample_surface(object, n, rng);
  } else {
    std::vector<Vec3> fg;
    const auto& cloud = scene.cloud();
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (cloud.foreground[i]) fg.push_back(cloud.points[i]);
    if (fg.empty()) throw std::invalid_argument("ocm: scene has no foreground geometry");
    std::uniform_int_distribution<std::size_t> pick(0, fg.size() - 1);
    for (int i = 0; i < n; ++i) samples.push_back(fg[pick(rng)]);
  }

  ContactMap map;
  map.component_count = k1;
  map.origin = Transform(Eigen::Translation3d(scene.object_center()));
  map.features = Eigen::MatrixXd::Zero(n, k1 + 5);
  for (int i = 0; i < n; ++i) {
    const geom::ClosestHit hg = gripper.closest(samples[i]);
    map.features.block<1, 3>(i, 0) = (samples[i] - scene.object_center()).transpose();
    map.features(i, 3) = hg.distance;
    map.features(i, 4) = 1.0;
    map.features.block(i, 5, 1, k1) = one_hot(model.links()[hg.source].component, k1);
  }
  return map;
}

ContactMap extract_gcm(const geom::Scene& scene, const model::GripperModel& model, const Eigen::VectorXd& q,
                       const model::BasePose& base, int n, std::uint64_t seed) {
  const geom::PosedGripper gripper(model, q, base);
  const int k1 = model.component_count();
  geom::Mesh merged;
  std::vector<int> tri_link;
  for (int l = 0; l < static_cast<int>(model.links().size()); ++l) {
    const geom::Mesh m = gripper.link_mesh(l);
    merged.append(m);
    tri_link.insert(tri_link.end(), m.size(), l);
  }
  std::mt19937_64 rng(seed);
  std::vector<int> tris;
  const std::vector<Vec3> samples = geom::sample_surface(merged, n, rng, &tris);

  const auto& root = model.root_keypoint();
  const Vec3 root_base = model.rest_frames()[root.link] * root.offset;
  ContactMap map;
  map.component_count = k1;
  map.origin = base.transform() * Transform(Eigen::Translation3d(root_base));
  const Transform inv = map.origin.inverse();
  map.features = Eigen::MatrixXd::Zero(n, k1 + 5);
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const geom::ClosestHit hs = scene.closest(samples[i]);
    map.features.block<1, 3>(i, 0) = (inv * samples[i]).transpose();
    map.features(i, 3) = hs.distance;
    map.features(i, 4) = hs.source > 0 ? 1.0 : 0.0;
    map.features.block(i, 5, 1, k1) = one_hot(model.links()[tri_link[tris[i]]].component, k1);
  }
  return map;
}

}  // namespace dexgrasp::ibs
