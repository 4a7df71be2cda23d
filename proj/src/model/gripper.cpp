#include "dexgrasp/model/gripper.hpp"

#include "dexgrasp/model/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace dexgrasp::model {
namespace {

int require_link(const std::map<std::string, int>& ids, const std::string& name, const std::string& what) {
  auto it = ids.find(name);
  if (it == ids.end()) throw SpecError(what + " references unknown link '" + name + "'");
  return it->second;
}

}  // namespace

GripperModel GripperModel::from_spec(const GripperSpec& spec) {
  GripperModel m;
  m.name_ = spec.name;
  if (spec.links.empty()) throw SpecError("gripper has no links");
  if (spec.fingers.empty()) throw SpecError("gripper has no fingers");

  std::map<std::string, int> link_ids;
  for (const auto& ls : spec.links) {
    if (!link_ids.emplace(ls.name, static_cast<int>(m.links_.size())).second)
      throw SpecError("duplicate link name '" + ls.name + "'");
    Link link;
    link.name = ls.name;
    link.mesh = ls.mesh;
    if (!link.mesh.empty()) {
      try {
        link.hull = geom::convex_hull(link.mesh.vertices);
      } catch (const geom::DegenerateHullError&) {
        throw SpecError("degenerate hull for link '" + ls.name + "'");
      }
      link.bvh = geom::Bvh(link.mesh);
    }
    m.links_.push_back(std::move(link));
  }

  std::set<std::string> joint_names;
  for (const auto& js : spec.joints) {
    if (!joint_names.insert(js.name).second) throw SpecError("duplicate joint name '" + js.name + "'");
    Joint j;
    j.name = js.name;
    j.type = js.type;
    j.parent_link = require_link(link_ids, js.parent, "joint '" + js.name + "'");
    j.child_link = require_link(link_ids, js.child, "joint '" + js.name + "'");
    if (j.parent_link == j.child_link) throw SpecError("joint '" + js.name + "' connects a link to itself");
    j.origin = js.origin;
    const double n = js.axis.norm();
    if (js.type != JointType::Fixed && n < 1e-12) throw SpecError("joint '" + js.name + "' has a zero axis");
    j.axis = n > 0.0 ? Vec3(js.axis / n) : Vec3::UnitZ();
    if (!(js.lower <= js.upper)) throw SpecError("invalid limits on joint '" + js.name + "'");
    j.lower = js.type == JointType::Fixed ? 0.0 : js.lower;
    j.upper = js.type == JointType::Fixed ? 0.0 : js.upper;
    j.actuated = js.type != JointType::Fixed && js.actuated;
    Link& child = m.links_[j.child_link];
    if (child.parent_joint >= 0) throw SpecError("link '" + child.name + "' has more than one parent joint");
    child.parent_joint = static_cast<int>(m.joints_.size());
    child.parent_link = j.parent_link;
    if (j.actuated) {
      j.dof = static_cast<int>(m.dof_joints_.size());
      m.dof_joints_.push_back(static_cast<int>(m.joints_.size()));
    }
    m.joints_.push_back(j);
  }

  // Exactly one root, and every link reachable from it.
  int roots = 0;
  for (int i = 0; i < static_cast<int>(m.links_.size()); ++i) {
    if (m.links_[i].parent_joint < 0) {
      m.base_link_ = i;
      ++roots;
    }
  }
  if (roots != 1) throw SpecError("disconnected kinematic tree");
  std::vector<std::vector<int>> children(m.links_.size());
  for (const auto& j : m.joints_) children[j.parent_link].push_back(j.child_link);
  std::deque<int> queue{m.base_link_};
  while (!queue.empty()) {
    const int l = queue.front();
    queue.pop_front();
    m.order_.push_back(l);
    for (int c : children[l]) queue.push_back(c);
  }
  if (m.order_.size() != m.links_.size()) throw SpecError("disconnected kinematic tree");

  const int dofs = m.dof();
  m.moves_.assign(m.links_.size(), std::vector<bool>(dofs, false));
  for (int l : m.order_) {
    const int pj = m.links_[l].parent_joint;
    if (pj < 0) continue;
    m.moves_[l] = m.moves_[m.joints_[pj].parent_link];
    if (m.joints_[pj].dof >= 0) m.moves_[l][m.joints_[pj].dof] = true;
  }

  auto resolve_kp = [&](const KeypointSpec& ks, const std::string& what) {
    return Keypoint{require_link(link_ids, ks.link, what), ks.offset};
  };
  std::vector<int> finger_of(m.links_.size(), -1);
  for (int k = 0; k < static_cast<int>(spec.fingers.size()); ++k) {
    const auto& fs = spec.fingers[k];
    Finger f;
    f.name = fs.name;
    if (fs.links.empty()) throw SpecError("finger '" + fs.name + "' has an empty chain");
    for (const auto& ln : fs.links) {
      const int l = require_link(link_ids, ln, "finger '" + fs.name + "'");
      if (finger_of[l] >= 0) throw SpecError("link '" + ln + "' belongs to two fingers");
      finger_of[l] = k;
      f.links.push_back(l);
    }
    f.middle = resolve_kp(fs.middle, "keypoint of finger '" + fs.name + "'");
    f.tip = resolve_kp(fs.tip, "keypoint of finger '" + fs.name + "'");
    m.fingers_.push_back(std::move(f));
  }
  for (int k = 0; k < static_cast<int>(m.fingers_.size()); ++k) {
    const auto& chain = m.fingers_[k].links;
    const int first_parent = m.links_[chain.front()].parent_link;
    bool ok = first_parent >= 0 && finger_of[first_parent] < 0;
    for (std::size_t i = 1; ok && i < chain.size(); ++i) ok = m.links_[chain[i]].parent_link == chain[i - 1];
    if (!ok) throw SpecError("finger chain '" + m.fingers_[k].name + "' is not a connected path from the palm");
  }
  for (int l : m.order_) {
    if (finger_of[l] >= 0) {
      m.links_[l].component = finger_of[l] + 1;
    } else if (m.links_[l].parent_link >= 0) {
      m.links_[l].component = m.links_[m.links_[l].parent_link].component;
    }
  }

  m.root_ = resolve_kp(spec.root, "root keypoint");
  for (int d = 0; d < dofs; ++d) {
    if (m.moves_[m.root_.link][d]) throw SpecError("root keypoint must sit on a link no joint moves");
  }

  m.palm_frame_ = spec.palm_frame;
  if (spec.d_up.norm() < 1e-12) throw SpecError("d_up must be non-zero");
  m.d_up_ = spec.d_up.normalized();

  m.lower_.resize(dofs);
  m.upper_.resize(dofs);
  for (int d = 0; d < dofs; ++d) {
    m.lower_[d] = m.joints_[m.dof_joints_[d]].lower;
    m.upper_[d] = m.joints_[m.dof_joints_[d]].upper;
  }
  m.rest_ = Eigen::VectorXd::Zero(dofs).cwiseMax(m.lower_).cwiseMin(m.upper_);
  m.rest_frames_ = link_frames(m, m.rest_).link;
  return m;
}

int GripperModel::link_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(links_.size()); ++i) {
    if (links_[i].name == name) return i;
  }
  return -1;
}

int GripperModel::joint_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(joints_.size()); ++i) {
    if (joints_[i].name == name) return i;
  }
  return -1;
}

bool GripperModel::adjacent(int a, int b) const {
  return links_[a].parent_link == b || links_[b].parent_link == a;
}

}  // namespace dexgrasp::model
