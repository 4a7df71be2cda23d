#include "dexgrasp/model/loader.hpp"

#include "dexgrasp/geom/pose_json.hpp"

#include <fstream>
#include <sstream>

namespace dexgrasp::model {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw SpecError("schema: missing field '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw SpecError("schema: field '" + std::string(key) + "' in " + where + " must be a string");
  return v.get<std::string>();
}

Vec3 vec_field(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
    throw SpecError("schema: " + where + " must be an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

Transform transform_field(const json& v, const std::string& where) {
  if (v.is_null()) return Transform::Identity();
  if (!v.is_object()) throw SpecError("schema: " + where + " must be an object with xyz/rpy");
  Transform t = Transform::Identity();
  if (v.contains("rpy")) t.linear() = geom::rpy_to_matrix(vec_field(v.at("rpy"), where + ".rpy"));
  if (v.contains("xyz")) t.translation() = vec_field(v.at("xyz"), where + ".xyz");
  return t;
}

KeypointSpec keypoint_field(const json& v, const std::string& where) {
  return {string_field(v, "link", where), vec_field(field(v, "offset", where), where + ".offset")};
}

double unit_scale(const std::string& units, const std::string& where) {
  if (units == "m") return 1.0;
  if (units == "mm") return 1e-3;
  throw SpecError("schema: unknown units '" + units + "' in " + where);
}

}  // namespace

GripperSpec parse_gripper_spec(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw SpecError("schema: gripper spec must be an object");
  GripperSpec spec;
  spec.name = doc.value("name", std::string("gripper"));
  const double default_scale = unit_scale(doc.value("units", std::string("m")), "gripper");

  const json& links = field(doc, "links", "gripper");
  if (!links.is_array()) throw SpecError("schema: 'links' must be an array");
  for (const auto& lj : links) {
    LinkSpec ls;
    ls.name = string_field(lj, "name", "link");
    const std::string where = "link '" + ls.name + "'";
    if (lj.contains("mesh")) {
      if (!lj.at("mesh").is_string()) throw SpecError("schema: mesh of " + where + " must be a file path");
      double s = default_scale;
      if (lj.contains("units")) s = unit_scale(lj.at("units").get<std::string>(), where);
      try {
        ls.mesh = geom::load_obj(base_dir / lj.at("mesh").get<std::string>());
      } catch (const std::runtime_error& e) {
        throw SpecError(e.what());
      }
      ls.mesh = ls.mesh.scaled(geom::Vec3::Constant(s));
      if (lj.contains("scale")) ls.mesh = ls.mesh.scaled(vec_field(lj.at("scale"), where + ".scale"));
      if (lj.contains("origin")) ls.mesh = ls.mesh.transformed(transform_field(lj.at("origin"), where + ".origin"));
    }
    spec.links.push_back(std::move(ls));
  }

  const json& joints = field(doc, "joints", "gripper");
  if (!joints.is_array()) throw SpecError("schema: 'joints' must be an array");
  for (const auto& jj : joints) {
    JointSpec js;
    js.name = string_field(jj, "name", "joint");
    const std::string where = "joint '" + js.name + "'";
    const std::string type = string_field(jj, "type", where);
    if (type == "revolute") js.type = JointType::Revolute;
    else if (type == "prismatic") js.type = JointType::Prismatic;
    else if (type == "fixed") js.type = JointType::Fixed;
    else throw SpecError("schema: unknown joint type '" + type + "' in " + where);
    js.parent = string_field(jj, "parent", where);
    js.child = string_field(jj, "child", where);
    js.origin = transform_field(jj.value("origin", json()), where + ".origin");
    if (js.type != JointType::Fixed) {
      js.axis = vec_field(field(jj, "axis", where), where + ".axis");
      const json& lim = field(jj, "limits", where);
      if (!lim.is_array() || lim.size() != 2 || !lim[0].is_number() || !lim[1].is_number())
        throw SpecError("schema: limits of " + where + " must be [lower, upper]");
      js.lower = lim[0].get<double>();
      js.upper = lim[1].get<double>();
      if (jj.contains("actuated")) {
        if (!jj.at("actuated").is_boolean()) throw SpecError("schema: actuated of " + where + " must be a boolean");
        js.actuated = jj.at("actuated").get<bool>();
      }
    }
    spec.joints.push_back(std::move(js));
  }

  const json& fingers = field(doc, "fingers", "gripper");
  if (!fingers.is_array()) throw SpecError("schema: 'fingers' must be an array of link-name arrays");
  const json& kps = field(doc, "keypoints", "gripper");
  const json& finger_kps = field(kps, "fingers", "keypoints");
  if (!finger_kps.is_array() || finger_kps.size() != fingers.size())
    throw SpecError("schema: keypoints.fingers must hold one entry per finger");
  for (std::size_t k = 0; k < fingers.size(); ++k) {
    FingerSpec fs;
    fs.name = "finger" + std::to_string(k);
    if (!fingers[k].is_array()) throw SpecError("schema: finger chain must be an array of link names");
    for (const auto& ln : fingers[k]) {
      if (!ln.is_string()) throw SpecError("schema: finger chain entries must be link names");
      fs.links.push_back(ln.get<std::string>());
    }
    const std::string where = "keypoints of " + fs.name;
    fs.middle = keypoint_field(field(finger_kps[k], "middle", where), where + ".middle");
    fs.tip = keypoint_field(field(finger_kps[k], "tip", where), where + ".tip");
    spec.fingers.push_back(std::move(fs));
  }
  spec.root = keypoint_field(field(kps, "root", "keypoints"), "keypoints.root");
  spec.palm_frame = transform_field(field(doc, "palm_frame", "gripper"), "palm_frame");
  spec.d_up = vec_field(field(doc, "d_up", "gripper"), "d_up");
  return spec;
}

GripperModel load_gripper(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("schema: parse error: ") + e.what());
  }
  return GripperModel::from_spec(parse_gripper_spec(doc, base_dir));
}

GripperModel load_gripper_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open gripper spec: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_gripper(ss.str(), path.parent_path());
}

}  // namespace dexgrasp::model
