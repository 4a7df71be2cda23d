#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

namespace dexgrasp::testing {

/// Supporting hyperplanes of a point set in R^d found by trying every
/// d-subset: a subset spans a facet when its hyperplane has all points on
/// one side. Returns the smallest facet offset seen from the origin, or
/// zero when the origin is on or outside some facet.
inline double brute_origin_depth(const std::vector<Eigen::VectorXd>& pts, double tol = 1e-9) {
  const int n = static_cast<int>(pts.size());
  const int d = static_cast<int>(pts[0].size());
  double depth = std::numeric_limits<double>::infinity();
  bool outside = false;
  std::vector<int> idx(d);
  std::function<void(int, int)> rec = [&](int start, int depth_level) {
    if (outside) return;
    if (depth_level == d) {
      Eigen::MatrixXd a(d - 1, d);
      for (int i = 1; i < d; ++i) a.row(i - 1) = (pts[idx[i]] - pts[idx[0]]).transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      lu.setThreshold(1e-10);
      if (lu.rank() < d - 1) return;
      Eigen::VectorXd nrm = lu.kernel().col(0).normalized();
      double off = nrm.dot(pts[idx[0]]);
      double lo = 0.0, hi = 0.0;
      for (const auto& p : pts) {
        const double s = nrm.dot(p) - off;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      if (lo < -tol && hi > tol) return;
      if (hi > tol) {
        nrm = -nrm;
        off = -off;
      }
      if (off <= tol) outside = true;
      depth = std::min(depth, off);
      return;
    }
    for (int i = start; i <= n - (d - depth_level); ++i) {
      idx[depth_level] = i;
      rec(i + 1, depth_level + 1);
    }
  };
  rec(0, 0);
  if (outside || !std::isfinite(depth)) return 0.0;
  return depth;
}

}  // namespace dexgrasp::testing
