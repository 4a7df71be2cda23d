#pragma once

#include "dexgrasp/geom/types.hpp"

namespace dexgrasp::geom {

/// Closest point to `p` on triangle (a, b, c).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Closest points between segments [p1, q1] and [p2, q2]. Returns squared distance.
double closest_points_segments(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2,
                               Vec3& c1, Vec3& c2);

/// True if segment [p, q] crosses triangle (a, b, c).
bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c);

/// Exact distance between two triangles, with the closest pair written to
/// `on_first` / `on_second`. Intersecting triangles give zero.
double triangle_triangle_distance(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                                  const Vec3& b1, const Vec3& b2, Vec3& on_first, Vec3& on_second);

/// Ray/triangle intersection (Moller-Trumbore). Returns the hit parameter or a negative value.
double ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                    const Vec3& c);

}  // namespace dexgrasp::geom
