#include "dexgrasp/geom/distance.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dexgrasp::geom {

// Voronoi-region walk from Ericson, "Real-Time Collision Detection", 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

double closest_points_segments(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2,
                               Vec3& c1, Vec3& c2) {
  constexpr double kEps = 1e-18;
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    c1 = p1;
    c2 = p2;
    return (c1 - c2).squaredNorm();
  }
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom != 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  c1 = p1 + d1 * s;
  c2 = p2 + d2 * t;
  return (c1 - c2).squaredNorm();
}

bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c) {
  const Vec3 dir = q - p;
  const double t = ray_triangle(p, dir, a, b, c);
  return t >= 0.0 && t <= 1.0;
}

double ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                    const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-300) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = inv * s.dot(h);
  if (u < 0.0 || u > 1.0) return -1.0;
  const Vec3 qv = s.cross(e1);
  const double v = inv * dir.dot(qv);
  if (v < 0.0 || u + v > 1.0) return -1.0;
  return inv * e2.dot(qv);
}

double triangle_triangle_distance(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                                  const Vec3& b1, const Vec3& b2, Vec3& on_first,
                                  Vec3& on_second) {
  const std::array<Vec3, 3> ta{a0, a1, a2};
  const std::array<Vec3, 3> tb{b0, b1, b2};

  // Any edge piercing the other triangle means intersection.
  for (int i = 0; i < 3; ++i) {
    const Vec3& p = ta[i];
    const Vec3& q = ta[(i + 1) % 3];
    if (segment_intersects_triangle(p, q, b0, b1, b2)) {
      const double t = ray_triangle(p, q - p, b0, b1, b2);
      on_first = on_second = p + t * (q - p);
      return 0.0;
    }
  }
  for (int i = 0; i < 3; ++i) {
    const Vec3& p = tb[i];
    const Vec3& q = tb[(i + 1) % 3];
    if (segment_intersects_triangle(p, q, a0, a1, a2)) {
      const double t = ray_triangle(p, q - p, a0, a1, a2);
      on_first = on_second = p + t * (q - p);
      return 0.0;
    }
  }

  // Otherwise the minimum is attained at a vertex-face or an edge-edge pair.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Vec3 cb = closest_point_on_triangle(ta[i], b0, b1, b2);
    const double d = (cb - ta[i]).squaredNorm();
    if (d < best) {
      best = d;
      on_first = ta[i];
      on_second = cb;
    }
    const Vec3 ca = closest_point_on_triangle(tb[i], a0, a1, a2);
    const double d2 = (ca - tb[i]).squaredNorm();
    if (d2 < best) {
      best = d2;
      on_first = ca;
      on_second = tb[i];
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Vec3 c1, c2;
      const double d = closest_points_segments(ta[i], ta[(i + 1) % 3], tb[j], tb[(j + 1) % 3], c1, c2);
      if (d < best) {
        best = d;
        on_first = c1;
        on_second = c2;
      }
    }
  }
  return std::sqrt(best);
}

}  // namespace dexgrasp::geom
