#pragma once

#include "dexgrasp/geom/types.hpp"

#include <nlohmann/json.hpp>

namespace dexgrasp::geom {

/// Roll-pitch-yaw (fixed-axis x, y, z) to rotation, URDF convention.
Mat3 rpy_to_matrix(const Vec3& rpy);
Vec3 matrix_to_rpy(const Mat3& r);

Vec3 vec3_from_json(const nlohmann::json& j);
nlohmann::json vec3_to_json(const Vec3& v);

/// {"xyz": [...], "rpy": [...]} with both fields optional.
Transform transform_from_json(const nlohmann::json& j);
nlohmann::json transform_to_json(const Transform& t);

}  // namespace dexgrasp::geom
