// Copyright 2026 The robosetup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robosetup/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "robosetup/error.hpp"
#include "robosetup/xml.hpp"

namespace robosetup {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::kError: return "error";
    case Severity::kWarning: return "warning";
    case Severity::kInfo: return "info";
  }
  return "info";
}

std::size_t ValidationReport::count(Severity severity) const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                [&](const Finding& f) { return f.severity == severity; }));
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const auto& f : findings) {
    out << to_string(f.severity) << ": " << (f.element.empty() ? "-" : f.element) << ": " << f.message << '\n';
  }
  return out.str();
}

std::string_view to_string(JointKind kind) {
  switch (kind) {
    case JointKind::kFixed: return "fixed";
    case JointKind::kRevolute: return "revolute";
    case JointKind::kContinuous: return "continuous";
    case JointKind::kPrismatic: return "prismatic";
    case JointKind::kFloating: return "floating";
    case JointKind::kPlanar: return "planar";
  }
  return "fixed";
}

std::vector<std::string> Joint::variable_names() const {
  if (mimic) return {};
  switch (kind) {
    case JointKind::kFixed: return {};
    case JointKind::kPlanar: return {name + "/x", name + "/y", name + "/theta"};
    case JointKind::kFloating:
      return {name + "/x", name + "/y", name + "/z", name + "/roll", name + "/pitch", name + "/yaw"};
    default: return {name};
  }
}

RobotModel::RobotModel(std::string name, std::vector<Link> links, std::vector<Joint> joints,
                       std::vector<std::string> warnings)
    : name_(std::move(name)), links_(std::move(links)), joints_(std::move(joints)),
      warnings_(std::move(warnings)) {
  if (links_.empty()) throw Error(ErrorCode::kValidation, "robot has no links", name_);
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!link_lookup_.emplace(links_[i].name, i).second) {
      throw Error(ErrorCode::kValidation, "duplicate link name '" + links_[i].name + "'", links_[i].name);
    }
  }
  parent_joint_.assign(links_.size(), std::nullopt);
  child_joints_.assign(links_.size(), {});
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    const Joint& joint = joints_[j];
    if (!joint_lookup_.emplace(joint.name, j).second) {
      throw Error(ErrorCode::kValidation, "duplicate joint name '" + joint.name + "'", joint.name);
    }
    const auto parent = link_index(joint.parent_link);
    const auto child = link_index(joint.child_link);
    if (!parent) {
      throw Error(ErrorCode::kValidation,
                  "joint '" + joint.name + "' references undeclared parent link '" + joint.parent_link + "'",
                  joint.name + "/" + joint.parent_link);
    }
    if (!child) {
      throw Error(ErrorCode::kValidation,
                  "joint '" + joint.name + "' references undeclared child link '" + joint.child_link + "'",
                  joint.name + "/" + joint.child_link);
    }
    if (parent_joint_[*child]) {
      throw Error(ErrorCode::kValidation,
                  "link '" + joint.child_link + "' is the child of more than one joint", joint.name);
    }
    parent_joint_[*child] = j;
    child_joints_[*parent].push_back(j);
    if (joint.has_position_limits()) {
      if (!joint.limits) {
        throw Error(ErrorCode::kValidation, "joint '" + joint.name + "' requires <limit>", joint.name);
      }
      if (!(joint.limits->lower <= joint.limits->upper)) {
        throw Error(ErrorCode::kValidation, "joint '" + joint.name + "' has lower limit above upper",
                    joint.name);
      }
    }
  }
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!parent_joint_[i]) roots.push_back(i);
  }
  if (roots.empty()) throw Error(ErrorCode::kValidation, "kinematic graph has a cycle (no root link)", name_);
  if (roots.size() > 1) {
    throw Error(ErrorCode::kValidation,
                "multiple root links: '" + links_[roots[0]].name + "' and '" + links_[roots[1]].name + "'",
                links_[roots[1]].name);
  }
  root_ = roots[0];

  // Depth-first traversal, document order among siblings.
  std::vector<bool> seen(links_.size(), false);
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    const std::size_t l = stack.back();
    stack.pop_back();
    seen[l] = true;
    const auto& kids = child_joints_[l];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*link_index(joints_[*it].child_link));
    if (auto pj = parent_joint_[l]) joint_order_.push_back(*pj);
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kValidation, "link '" + links_[i].name + "' is part of a cycle", links_[i].name);
    }
  }
  for (std::size_t j : joint_order_) {
    const Joint& joint = joints_[j];
    if (joint.kind == JointKind::kFixed || joint.mimic) continue;
    active_joints_.push_back(joint.name);
    for (auto& v : joint.variable_names()) variables_.push_back(std::move(v));
  }
}

std::optional<std::size_t> RobotModel::link_index(std::string_view name) const {
  auto it = link_lookup_.find(std::string(name));
  if (it == link_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> RobotModel::joint_index(std::string_view name) const {
  auto it = joint_lookup_.find(std::string(name));
  if (it == joint_lookup_.end()) return std::nullopt;
  return it->second;
}

const Link& RobotModel::link(std::string_view name) const {
  auto idx = link_index(name);
  if (!idx) throw Error(ErrorCode::kNotFound, "unknown link '" + std::string(name) + "'", std::string(name));
  return links_[*idx];
}

const Joint& RobotModel::joint(std::string_view name) const {
  auto idx = joint_index(name);
  if (!idx) throw Error(ErrorCode::kNotFound, "unknown joint '" + std::string(name) + "'", std::string(name));
  return joints_[*idx];
}

std::vector<std::size_t> RobotModel::joints_to_root(std::size_t link) const {
  std::vector<std::size_t> out;
  while (auto pj = parent_joint_[link]) {
    out.push_back(*pj);
    link = *link_index(joints_[*pj].parent_link);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool RobotModel::is_ancestor(std::size_t ancestor, std::size_t link) const {
  while (true) {
    if (link == ancestor) return true;
    auto pj = parent_joint_[link];
    if (!pj) return false;
    link = *link_index(joints_[*pj].parent_link);
  }
}

std::size_t RobotModel::depth() const {
  std::size_t d = 0;
  for (std::size_t l = 0; l < links_.size(); ++l) d = std::max(d, joints_to_root(l).size());
  return d;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const std::string& where) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != expected || !std::all_of(out.begin(), out.end(), [](double x) { return std::isfinite(x); })) {
    throw Error(ErrorCode::kParse, "expected " + std::to_string(expected) + " numbers in '" + text + "'", where);
  }
  return out;
}

double number_attr(const xml::Element& el, std::string_view key, double fallback, const std::string& where) {
  const std::string* value = el.attribute(key);
  if (value == nullptr) return fallback;
  return parse_numbers(*value, 1, where)[0];
}

Vec3 vec3_attr(const xml::Element& el, std::string_view key, const Vec3& fallback, const std::string& where) {
  const std::string* value = el.attribute(key);
  if (value == nullptr) return fallback;
  const auto v = parse_numbers(*value, 3, where);
  return {v[0], v[1], v[2]};
}

Pose parse_origin(const xml::Element* origin, const std::string& where) {
  if (origin == nullptr) return Pose::identity();
  return Pose::from_xyz_rpy(vec3_attr(*origin, "xyz", Vec3::Zero(), where),
                            vec3_attr(*origin, "rpy", Vec3::Zero(), where));
}

std::string require_attr(const xml::Element& el, std::string_view key, const std::string& where) {
  const std::string* value = el.attribute(key);
  if (value == nullptr || value->empty()) {
    throw Error(ErrorCode::kParse,
                "<" + el.name + "> at line " + std::to_string(el.line) + " is missing attribute '" +
                    std::string(key) + "'",
                where);
  }
  return *value;
}

std::filesystem::path resolve_mesh(const std::string& filename, const std::filesystem::path& asset_root) {
  std::string path = filename;
  for (std::string_view prefix : {"package://", "file://"}) {
    if (path.rfind(prefix, 0) == 0) path = path.substr(prefix.size());
  }
  std::filesystem::path p(path);
  if (p.is_relative() && !asset_root.empty()) p = asset_root / p;
  return p;
}

Shape parse_geometry(const xml::Element& geom, const std::filesystem::path& asset_root, const std::string& where,
                     std::vector<std::string>& warnings) {
  for (const auto& child : geom.children) {
    const xml::Element& g = *child;
    Shape shape;
    if (g.name == "box") {
      const Vec3 size = vec3_attr(g, "size", Vec3::Zero(), where);
      shape = Box{size / 2.0};
    } else if (g.name == "sphere") {
      shape = Sphere{number_attr(g, "radius", 0.0, where)};
    } else if (g.name == "cylinder") {
      shape = Cylinder{number_attr(g, "radius", 0.0, where), number_attr(g, "length", 0.0, where)};
    } else if (g.name == "mesh") {
      const auto file = resolve_mesh(require_attr(g, "filename", where), asset_root);
      const Vec3 scale = vec3_attr(g, "scale", Vec3::Ones(), where);
      std::vector<Vec3> verts;
      try {
        verts = load_mesh_vertices(file);
      } catch (const Error& e) {
        throw Error(ErrorCode::kValidation, "unresolvable mesh for " + where + ": " + e.what(), where);
      }
      for (auto& v : verts) v = v.cwiseProduct(scale);
      try {
        shape = convex_hull(verts);
      } catch (const Error& e) {
        throw Error(ErrorCode::kValidation, "mesh for " + where + ": " + e.what(), where);
      }
    } else {
      warnings.push_back(where + ": ignored geometry element <" + g.name + ">");
      continue;
    }
    try {
      check_shape(shape);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, std::string(e.what()) + " (" + where + ")", where);
    }
    return shape;
  }
  throw Error(ErrorCode::kParse, "<geometry> without a supported shape", where);
}

const std::set<std::string, std::less<>> kIgnoredWithWarning = {"transmission", "gazebo", "material", "sensor"};

}  // namespace

RobotModel parse_urdf(std::string_view document, const std::filesystem::path& asset_root) {
  const auto root = xml::parse(document);
  if (root->name != "robot") {
    throw Error(ErrorCode::kParse, "root element must be <robot>, found <" + root->name + ">", root->name);
  }
  const std::string robot_name = root->attribute("name") ? *root->attribute("name") : std::string("robot");
  std::vector<std::string> warnings;
  std::vector<Link> links;
  std::vector<Joint> joints;

  for (const auto& child : root->children) {
    const xml::Element& el = *child;
    if (el.name == "link") {
      Link link;
      link.name = require_attr(el, "name", "link@line" + std::to_string(el.line));
      for (const auto& sub : el.children) {
        const bool is_collision = sub->name == "collision";
        if (is_collision || sub->name == "visual") {
          const auto* geom = sub->first_child("geometry");
          if (geom == nullptr) throw Error(ErrorCode::kParse, "<" + sub->name + "> without <geometry>", link.name);
          Geometry g{parse_geometry(*geom, asset_root, link.name, warnings),
                     parse_origin(sub->first_child("origin"), link.name)};
          (is_collision ? link.collision : link.visual).push_back(std::move(g));
          for (const auto& extra : sub->children) {
            if (extra->name == "material") warnings.push_back(link.name + ": ignored <material>");
          }
        } else if (sub->name == "inertial") {
          if (const auto* mass = sub->first_child("mass")) link.mass = number_attr(*mass, "value", 0.0, link.name);
        } else {
          warnings.push_back(link.name + ": ignored element <" + sub->name + ">");
        }
      }
      links.push_back(std::move(link));
    } else if (el.name == "joint") {
      Joint joint;
      joint.name = require_attr(el, "name", "joint@line" + std::to_string(el.line));
      const std::string type = require_attr(el, "type", joint.name);
      if (type == "fixed") joint.kind = JointKind::kFixed;
      else if (type == "revolute") joint.kind = JointKind::kRevolute;
      else if (type == "continuous") joint.kind = JointKind::kContinuous;
      else if (type == "prismatic") joint.kind = JointKind::kPrismatic;
      else if (type == "floating") joint.kind = JointKind::kFloating;
      else if (type == "planar") joint.kind = JointKind::kPlanar;
      else throw Error(ErrorCode::kParse, "joint '" + joint.name + "' has unknown type '" + type + "'", joint.name);

      const auto* parent = el.first_child("parent");
      const auto* child_el = el.first_child("child");
      if (parent == nullptr || child_el == nullptr) {
        throw Error(ErrorCode::kParse, "joint '" + joint.name + "' needs <parent> and <child>", joint.name);
      }
      joint.parent_link = require_attr(*parent, "link", joint.name);
      joint.child_link = require_attr(*child_el, "link", joint.name);
      joint.origin = parse_origin(el.first_child("origin"), joint.name);
      if (const auto* axis = el.first_child("axis")) {
        joint.axis = vec3_attr(*axis, "xyz", Vec3::UnitX(), joint.name);
      }
      if (joint.axis.norm() < 1e-12) {
        throw Error(ErrorCode::kValidation, "joint '" + joint.name + "' has a zero axis", joint.name);
      }
      joint.axis.normalize();
      if (const auto* limit = el.first_child("limit")) {
        JointLimits lim;
        lim.lower = number_attr(*limit, "lower", 0.0, joint.name);
        lim.upper = number_attr(*limit, "upper", 0.0, joint.name);
        lim.max_velocity = number_attr(*limit, "velocity", 0.0, joint.name);
        lim.max_effort = number_attr(*limit, "effort", 0.0, joint.name);
        joint.limits = lim;
      }
      if (el.first_child("mimic") != nullptr) {
        joint.mimic = true;
        warnings.push_back(joint.name + ": mimic coupling ignored; joint held at zero");
      }
      for (const auto& sub : el.children) {
        static const std::set<std::string, std::less<>> known = {"parent", "child", "origin", "axis", "limit",
                                                                 "mimic"};
        if (known.count(sub->name) == 0) warnings.push_back(joint.name + ": ignored element <" + sub->name + ">");
      }
      joints.push_back(std::move(joint));
    } else if (kIgnoredWithWarning.count(el.name) > 0) {
      warnings.push_back("ignored element <" + el.name + ">");
    } else {
      warnings.push_back("unknown element <" + el.name + "> ignored");
    }
  }
  return RobotModel(robot_name, std::move(links), std::move(joints), std::move(warnings));
}

RobotModel load_urdf_file(const std::filesystem::path& file, const std::optional<std::filesystem::path>& asset_root) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + file.string(), file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_urdf(buf.str(), asset_root ? *asset_root : file.parent_path());
}

ValidationReport validate_model(const RobotModel& model) {
  ValidationReport report;
  for (const auto& w : model.warnings()) report.add(Severity::kWarning, model.name(), w);
  for (const auto& link : model.links()) {
    if (link.collision.empty()) report.add(Severity::kWarning, link.name, "link has no collision geometry");
  }
  for (const auto& joint : model.joints()) {
    if (joint.has_position_limits() && joint.limits && joint.limits->lower == joint.limits->upper) {
      report.add(Severity::kWarning, joint.name, "joint limits have zero range");
    }
  }
  report.add(Severity::kInfo, model.name(),
             "links=" + std::to_string(model.links().size()) + " joints=" + std::to_string(model.joints().size()) +
                 " active=" + std::to_string(model.active_joints().size()) +
                 " depth=" + std::to_string(model.depth()) + " root=" + model.root_link());
  return report;
}

std::vector<LinkPair> collidable_pairs(const RobotModel& model) {
  std::vector<std::string> names;
  for (const auto& link : model.links()) {
    if (!link.collision.empty()) names.push_back(link.name);
  }
  std::sort(names.begin(), names.end());
  std::vector<LinkPair> pairs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) pairs.emplace_back(names[i], names[j]);
  }
  return pairs;
}

}  // namespace robosetup
