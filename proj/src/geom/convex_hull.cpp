#include "dexgrasp/geom/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace dexgrasp::geom {
namespace {

struct WorkFace {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
};

WorkFace make_face(std::span<const Vec3> pts, int a, int b, int c) {
  WorkFace f;
  f.v = {a, b, c};
  f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
  f.offset = f.normal.dot(pts[a]);
  return f;
}

}  // namespace

ConvexHull convex_hull(std::span<const Vec3> pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw DegenerateHullError();

  Aabb box;
  for (const auto& p : pts) box.extend(p);
  const double scale = std::max(box.extent().norm(), 1e-300);
  const double eps = 1e-10 * scale;

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    if (pts[i].x() < pts[i0].x()) i0 = i;
  }
  int i1 = -1;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).squaredNorm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  if (std::sqrt(best) <= eps) throw DegenerateHullError();
  const Vec3 dir = (pts[i1] - pts[i0]).normalized();
  int i2 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double d = (r - r.dot(dir) * dir).squaredNorm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (std::sqrt(best) <= eps) throw DegenerateHullError();
  const Vec3 plane_n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(plane_n.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (best <= eps) throw DegenerateHullError();

  std::vector<WorkFace> faces;
  const Vec3 inner = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  auto add_oriented = [&](int a, int b, int c) {
    WorkFace f = make_face(pts, a, b, c);
    if (f.normal.dot(inner) - f.offset > 0.0) f = make_face(pts, a, c, b);
    faces.push_back(f);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  std::vector<int> visible;
  std::map<std::pair<int, int>, int> edge_owner;
  for (int pi = 0; pi < n; ++pi) {
    if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
    const Vec3& p = pts[pi];
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (faces[f].alive && faces[f].normal.dot(p) - faces[f].offset > eps) visible.push_back(f);
    }
    if (visible.empty()) continue;

    edge_owner.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edge_owner[{v[e], v[(e + 1) % 3]}] = f;
    }
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e];
        const int b = v[(e + 1) % 3];
        if (!edge_owner.contains({b, a})) horizon.emplace_back(a, b);
      }
    }
    for (int f : visible) faces[f].alive = false;
    for (const auto& [a, b] : horizon) faces.push_back(make_face(pts, a, b, pi));
  }

  ConvexHull hull;
  std::map<int, int> remap;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    ConvexHull::Face out;
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = remap.emplace(f.v[k], static_cast<int>(hull.vertices.size()));
      if (inserted) hull.vertices.push_back(pts[f.v[k]]);
      out.v[k] = it->second;
    }
    out.normal = f.normal;
    out.offset = f.offset;
    hull.faces.push_back(out);
  }
  Vec3 c = Vec3::Zero();
  for (const auto& v : hull.vertices) c += v;
  hull.centroid = c / static_cast<double>(hull.vertices.size());
  return hull;
}

double signed_distance_hull(const ConvexHull& hull, const Vec3& p, int& face) {
  double best = std::numeric_limits<double>::infinity();
  face = -1;
  for (int f = 0; f < static_cast<int>(hull.faces.size()); ++f) {
    const double d = hull.faces[f].offset - hull.faces[f].normal.dot(p);
    if (d < best) {
      best = d;
      face = f;
    }
  }
  return best;
}

double signed_distance_hull(const ConvexHull& hull, const Vec3& p) {
  int face = -1;
  return signed_distance_hull(hull, p, face);
}

}  // namespace dexgrasp::geom
