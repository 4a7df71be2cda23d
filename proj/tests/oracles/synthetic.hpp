#pragma once

#include "dexgrasp/model/gripper.hpp"

#include <cmath>

namespace dexgrasp::testing {

using geom::Mesh;
using geom::Transform;
using geom::Vec3;

inline Transform translation(double x, double y, double z) {
  return Transform(Eigen::Translation3d(x, y, z));
}

/// Single planar finger with two unit-length links about z; the second joint
/// is optional. Tip keypoint at the end of the last link.
inline model::GripperModel planar_chain(int joints) {
  model::GripperSpec spec;
  spec.name = "chain";
  spec.links.push_back({"base", Mesh::box(Vec3(0.2, 0.2, 0.2))});
  model::FingerSpec finger{"f0", {}, {}, {}};
  std::string parent = "base";
  for (int j = 0; j < joints; ++j) {
    const std::string name = "l" + std::to_string(j);
    spec.links.push_back({name, Mesh::box(Vec3(0.8, 0.05, 0.05)).transformed(translation(0.5, 0, 0))});
    model::JointSpec js;
    js.name = "j" + std::to_string(j);
    js.parent = parent;
    js.child = name;
    js.origin = j == 0 ? Transform::Identity() : translation(1, 0, 0);
    js.axis = Vec3::UnitZ();
    js.lower = -M_PI;
    js.upper = M_PI;
    spec.joints.push_back(js);
    finger.links.push_back(name);
    parent = name;
  }
  finger.middle = {finger.links.front(), Vec3(1, 0, 0)};
  finger.tip = {finger.links.back(), Vec3(1, 0, 0)};
  spec.fingers.push_back(finger);
  spec.root = {"base", Vec3::Zero()};
  return model::GripperModel::from_spec(spec);
}

/// Two unit cubes hanging off a geometry-free base. Cube A sits at the
/// origin on a revolute joint about x; cube B sits at (0.8, 0, 0) on a
/// prismatic joint along x with limits [0, 0.5], so q = (0, 0) overlaps
/// the cubes by 0.2 along x and q_B >= 0.2 separates them.
inline model::GripperModel overlapping_boxes() {
  model::GripperSpec spec;
  spec.name = "boxes";
  spec.links.push_back({"base", Mesh{}});
  spec.links.push_back({"a", Mesh::box(Vec3::Ones())});
  spec.links.push_back({"b", Mesh::box(Vec3::Ones())});
  model::JointSpec ja;
  ja.name = "ja";
  ja.parent = "base";
  ja.child = "a";
  ja.axis = Vec3::UnitX();
  ja.lower = -0.5;
  ja.upper = 0.5;
  model::JointSpec jb;
  jb.name = "jb";
  jb.type = model::JointType::Prismatic;
  jb.parent = "base";
  jb.child = "b";
  jb.origin = translation(0.8, 0, 0);
  jb.axis = Vec3::UnitX();
  jb.lower = 0.0;
  jb.upper = 0.5;
  spec.joints = {ja, jb};
  spec.fingers.push_back({"fa", {"a"}, {"a", Vec3(0, 0.5, 0)}, {"a", Vec3(0, 0, 0.5)}});
  spec.fingers.push_back({"fb", {"b"}, {"b", Vec3(0, 0.5, 0)}, {"b", Vec3(0, 0, 0.5)}});
  spec.root = {"base", Vec3::Zero()};
  return model::GripperModel::from_spec(spec);
}

/// Penetration depth of p inside an axis-aligned cube of unit edge centred at c.
inline double cube_depth(const Vec3& p, const Vec3& c) {
  const Vec3 d = Vec3::Constant(0.5) - (p - c).cwiseAbs();
  return std::max(0.0, d.minCoeff());
}

}  // namespace dexgrasp::testing

namespace dexgrasp::testing {

/// Gripper whose palm is a single mesh; one geometry-free finger keeps the
/// spec valid. The palm frame coincides with the base frame.
inline model::GripperModel mesh_gripper(const Mesh& palm) {
  model::GripperSpec spec;
  spec.name = "mesh";
  spec.links.push_back({"palm", palm});
  spec.links.push_back({"stub", Mesh{}});
  model::JointSpec j;
  j.name = "j";
  j.parent = "palm";
  j.child = "stub";
  j.lower = -0.1;
  j.upper = 0.1;
  spec.joints.push_back(j);
  spec.fingers.push_back({"f", {"stub"}, {"stub", Vec3::Zero()}, {"stub", Vec3::UnitX() * 0.01}});
  spec.root = {"palm", Vec3::Zero()};
  return model::GripperModel::from_spec(spec);
}

}  // namespace dexgrasp::testing
