#include "dexgrasp/geom/pose_json.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dexgrasp::geom {

Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 matrix_to_rpy(const Mat3& r) {
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Transform transform_from_json(const nlohmann::json& j) {
  Transform t = Transform::Identity();
  if (j.is_null()) return t;
  if (!j.is_object()) throw std::invalid_argument("transform must be an object");
  if (j.contains("rpy")) t.linear() = rpy_to_matrix(vec3_from_json(j.at("rpy")));
  if (j.contains("xyz")) t.translation() = vec3_from_json(j.at("xyz"));
  return t;
}

nlohmann::json transform_to_json(const Transform& t) {
  return {{"xyz", vec3_to_json(t.translation())}, {"rpy", vec3_to_json(matrix_to_rpy(t.linear()))}};
}

}  // namespace dexgrasp::geom
