#include "dexgrasp/geom/point_index.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace dexgrasp::geom {

PointIndex::PointIndex(std::vector<Vec3> points, int leaf_size) : points_(std::move(points)) {
  if (points_.empty()) return;
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  build(0, static_cast<int>(points_.size()), std::max(1, leaf_size));
}

int PointIndex::build(int begin, int end, int leaf_size) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  for (int i = begin; i < end; ++i) box.extend(points_[order_[i]]);
  nodes_[idx].box = box;
  if (end - begin <= leaf_size) {
    nodes_[idx].begin = begin;
    nodes_[idx].count = end - begin;
    return idx;
  }
  int axis = 0;
  box.extent().maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     return points_[a][axis] < points_[b][axis] ||
                            (points_[a][axis] == points_[b][axis] && a < b);
                   });
  const int left = build(begin, mid, leaf_size);
  const int right = build(mid, end, leaf_size);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

std::vector<int> PointIndex::k_nearest(const Vec3& q, int k) const {
  if (points_.empty() || k <= 0) return {};
  k = std::min<int>(k, static_cast<int>(points_.size()));
  // Max-heap on (distance, index) keeps the k best; ties resolve to lower index.
  std::priority_queue<std::pair<double, int>> heap;
  auto worst = [&]() {
    return static_cast<int>(heap.size()) < k ? std::numeric_limits<double>::infinity()
                                              : heap.top().first;
  };
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(q) > worst()) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.begin + node.count; ++i) {
        const int p = order_[i];
        const std::pair<double, int> cand{(points_[p] - q).squaredNorm(), p};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(cand);
        } else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(q);
    const double dr = nodes_[node.right].box.squared_distance(q);
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  std::vector<int> out(heap.size());
  for (int i = static_cast<int>(heap.size()) - 1; i >= 0; --i) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

int PointIndex::nearest(const Vec3& q, double* distance) const {
  const auto nn = k_nearest(q, 1);
  if (nn.empty()) return -1;
  if (distance) *distance = (points_[nn[0]] - q).norm();
  return nn[0];
}

std::vector<Vec3> estimate_normals(const PointIndex& index, int k, const Vec3& viewpoint) {
  std::vector<Vec3> normals(index.size(), Vec3::UnitZ());
  const auto& pts = index.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto nn = index.k_nearest(pts[i], k);
    if (nn.size() < 3) continue;
    Vec3 mean = Vec3::Zero();
    for (int j : nn) mean += pts[j];
    mean /= static_cast<double>(nn.size());
    Mat3 cov = Mat3::Zero();
    for (int j : nn) {
      const Vec3 d = pts[j] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 n = eig.eigenvectors().col(0);
    if (n.dot(viewpoint - pts[i]) < 0.0) n = -n;
    normals[i] = n;
  }
  return normals;
}

}  // namespace dexgrasp::geom
