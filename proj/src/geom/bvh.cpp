#include "dexgrasp/geom/bvh.hpp"

#include "dexgrasp/geom/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dexgrasp::geom {

Bvh::Bvh(const Mesh& mesh, int leaf_size) {
  const int n = static_cast<int>(mesh.triangles.size());
  if (n == 0) return;
  tris_.reserve(n);
  normals_.reserve(n);
  tri_boxes_.resize(n);
  for (int t = 0; t < n; ++t) {
    tris_.push_back({mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2)});
    normals_.push_back(mesh.face_normal(t));
    tri_boxes_[t].extend(tris_[t].a);
    tri_boxes_[t].extend(tris_[t].b);
    tri_boxes_[t].extend(tris_[t].c);
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * n / std::max(1, leaf_size) + 1);
  build(0, n, std::max(1, leaf_size));
}

int Bvh::build(int begin, int end, int leaf_size) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroids;
  for (int i = begin; i < end; ++i) {
    box.extend(tri_boxes_[order_[i]]);
    centroids.extend(tri_boxes_[order_[i]].center());
  }
  nodes_[idx].box = box;
  if (end - begin <= leaf_size) {
    nodes_[idx].begin = begin;
    nodes_[idx].count = end - begin;
    return idx;
  }
  int axis = 0;
  centroids.extent().maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = tri_boxes_[a].center()[axis];
                     const double cb = tri_boxes_[b].center()[axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build(begin, mid, leaf_size);
  const int right = build(mid, end, leaf_size);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

const Aabb& Bvh::bounds() const {
  static const Aabb kEmpty;
  return nodes_.empty() ? kEmpty : nodes_.front().box;
}

ClosestHit Bvh::closest(const Vec3& p) const {
  return closest(p, std::numeric_limits<double>::infinity());
}

ClosestHit Bvh::closest(const Vec3& p, double bound) const {
  ClosestHit hit;
  if (nodes_.empty()) return hit;
  double best = bound * bound;
  int best_tri = -1;
  const double slack = 1.0 + kTieSlack;
  Vec3 best_point = Vec3::Zero();

  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(p) > best * slack) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.begin + node.count; ++i) {
        const int t = order_[i];
        const Tri& tri = tris_[t];
        const Vec3 c = closest_point_on_triangle(p, tri.a, tri.b, tri.c);
        const double d = (c - p).squaredNorm();
        const bool better = best_tri < 0 ? d <= best : d * slack < best;
        const bool tie = best_tri >= 0 && !better && d <= best * slack && t < best_tri;
        if (better || tie) {
          best = d;
          best_tri = t;
          best_point = c;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(p);
    const double dr = nodes_[node.right].box.squared_distance(p);
    // Push the farther child first so the nearer is visited next.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  if (best_tri < 0) return hit;
  hit.distance = std::sqrt(best);
  hit.point = best_point;
  hit.normal = normals_[best_tri];
  hit.primitive = best_tri;
  return hit;
}

Bvh::TrianglePair Bvh::closest_to_triangle(const Vec3& a, const Vec3& b, const Vec3& c,
                                           double bound) const {
  TrianglePair out;
  if (nodes_.empty()) return out;
  Aabb qbox;
  qbox.extend(a);
  qbox.extend(b);
  qbox.extend(c);
  double best = bound;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (std::sqrt(node.box.squared_distance(qbox)) > best) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.begin + node.count; ++i) {
        const int t = order_[i];
        const Tri& tri = tris_[t];
        Vec3 on_mesh, on_query;
        const double d = triangle_triangle_distance(tri.a, tri.b, tri.c, a, b, c, on_mesh, on_query);
        if (d < best || (d == best && out.primitive >= 0 && t < out.primitive)) {
          best = d;
          out.distance = d;
          out.on_mesh = on_mesh;
          out.on_query = on_query;
          out.primitive = t;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(qbox);
    const double dr = nodes_[node.right].box.squared_distance(qbox);
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return out;
}

}  // namespace dexgrasp::geom
