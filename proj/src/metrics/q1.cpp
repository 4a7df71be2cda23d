#include "dexgrasp/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace dexgrasp::metrics {

std::vector<Eigen::VectorXd> contact_wrenches(const std::vector<Contact>& contacts, const Transform& object_frame,
                                              double rho, const Q1Params& params) {
  std::vector<Eigen::VectorXd> out;
  const Transform inv = object_frame.inverse();
  for (const auto& c : contacts) {
    const Vec3 r = inv * c.point;
    const Vec3 inward = -(inv.linear() * c.normal).normalized();
    // tangent basis from the least-aligned local axis, so it moves with the object
    int axis = 0;
    inward.cwiseAbs().minCoeff(&axis);
    const Vec3 t1 = inward.cross(Vec3::Unit(axis)).normalized();
    const Vec3 t2 = inward.cross(t1);
    for (int j = 0; j < params.cone_edges; ++j) {
      const double th = 2.0 * std::numbers::pi * j / params.cone_edges;
      const Vec3 f = inward + params.mu * (std::cos(th) * t1 + std::sin(th) * t2);
      const Vec3 tau = r.cross(f) / rho;
      for (double sigma : {1.0, -1.0}) {
        Eigen::VectorXd w(6);
        w << f, tau + sigma * params.torsion * inward;
        out.push_back(w);
      }
    }
  }
  return out;
}

namespace {

struct Facet {
  std::vector<int> v;  // sorted vertex indices
  Eigen::VectorXd normal;
  double offset = 0.0;
  bool alive = true;
};

// Hyperplane through d points, oriented away from `inside`.
bool plane_through(const std::vector<Eigen::VectorXd>& pts, const std::vector<int>& idx, const Eigen::VectorXd& inside,
                   Eigen::VectorXd& normal, double& offset) {
  const int d = static_cast<int>(pts[idx[0]].size());
  Eigen::MatrixXd a(d - 1, d);
  for (int i = 1; i < d; ++i) a.row(i - 1) = (pts[idx[i]] - pts[idx[0]]).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  normal = svd.matrixV().col(d - 1);
  const double len = normal.norm();
  if (len < 1e-300) return false;
  normal /= len;
  offset = normal.dot(pts[idx[0]]);
  if (normal.dot(inside) > offset) {
    normal = -normal;
    offset = -offset;
  }
  return true;
}

std::vector<int> without(const std::vector<int>& v, std::size_t skip) {
  std::vector<int> r;
  r.reserve(v.size() - 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != skip) r.push_back(v[i]);
  return r;
}

}  // namespace

HullNd convex_hull_nd(const std::vector<Eigen::VectorXd>& points, double eps) {
  HullNd hull;
  const int n = static_cast<int>(points.size());
  if (n == 0) return hull;
  const int d = static_cast<int>(points[0].size());
  if (n < d + 1) return hull;

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.norm());
  const double tol = eps * std::max(scale, 1.0);

  // initial simplex: greedily maximise distance to the affine span so far
  std::vector<int> simplex;
  {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& p : points) mean += p;
    mean /= n;
    int first = 0;
    for (int i = 1; i < n; ++i)
      if ((points[i] - mean).norm() > (points[first] - mean).norm()) first = i;
    simplex.push_back(first);
    Eigen::MatrixXd basis(d, 0);
    while (static_cast<int>(simplex.size()) < d + 1) {
      int best = -1;
      double far = tol;
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x = points[i] - points[first];
        if (basis.cols() > 0) x -= basis * (basis.transpose() * x);
        if (x.norm() > far) {
          far = x.norm();
          best = i;
        }
      }
      if (best < 0) return hull;  // lower-dimensional input
      Eigen::VectorXd x = points[best] - points[first];
      if (basis.cols() > 0) x -= basis * (basis.transpose() * x);
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = x.normalized();
      simplex.push_back(best);
    }
  }
  Eigen::VectorXd inside = Eigen::VectorXd::Zero(d);
  for (int i : simplex) inside += points[i];
  inside /= (d + 1);

  std::vector<Facet> facets;
  std::map<std::vector<int>, std::vector<int>> ridges;
  auto add_facet = [&](std::vector<int> verts) {
    std::sort(verts.begin(), verts.end());
    Facet f;
    f.v = verts;
    if (!plane_through(points, f.v, inside, f.normal, f.offset)) return;
    const int id = static_cast<int>(facets.size());
    for (std::size_t s = 0; s < f.v.size(); ++s) ridges[without(f.v, s)].push_back(id);
    facets.push_back(std::move(f));
  };
  auto drop_facet = [&](int id) {
    facets[id].alive = false;
    for (std::size_t s = 0; s < facets[id].v.size(); ++s) {
      auto it = ridges.find(without(facets[id].v, s));
      auto& owners = it->second;
      owners.erase(std::remove(owners.begin(), owners.end(), id), owners.end());
      if (owners.empty()) ridges.erase(it);
    }
  };
  for (int s = 0; s <= d; ++s) add_facet(without(simplex, s));

  std::vector<char> used(n, 0);
  for (int i : simplex) used[i] = 1;
  for (int p = 0; p < n; ++p) {
    if (used[p]) continue;
    std::vector<int> visible;
    std::vector<char> is_visible(facets.size(), 0);
    for (int f = 0; f < static_cast<int>(facets.size()); ++f)
      if (facets[f].alive && facets[f].normal.dot(points[p]) - facets[f].offset > tol) {
        visible.push_back(f);
        is_visible[f] = 1;
      }
    if (visible.empty()) continue;
    std::vector<std::vector<int>> horizon;
    for (int f : visible)
      for (std::size_t s = 0; s < facets[f].v.size(); ++s) {
        const std::vector<int> ridge = without(facets[f].v, s);
        for (int g : ridges[ridge])
          if (g != f && !is_visible[g]) horizon.push_back(ridge);
      }
    for (int f : visible) drop_facet(f);
    for (auto& ridge : horizon) {
      ridge.push_back(p);
      add_facet(ridge);
    }
  }

  for (const auto& f : facets) {
    if (!f.alive) continue;
    hull.normals.push_back(f.normal);
    hull.offsets.push_back(f.offset);
  }
  hull.full_dimensional = true;
  return hull;
}

double origin_depth(const HullNd& hull, double eps) {
  if (!hull.full_dimensional || hull.offsets.empty()) return 0.0;
  const double depth = *std::min_element(hull.offsets.begin(), hull.offsets.end());
  return depth > eps ? depth : 0.0;
}

double q1(const std::vector<Contact>& contacts, const Transform& object_frame, double rho, const Q1Params& params) {
  if (contacts.size() < 2) return 0.0;
  return origin_depth(convex_hull_nd(contact_wrenches(contacts, object_frame, rho, params)));
}

}  // namespace dexgrasp::metrics
