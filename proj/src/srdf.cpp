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

#include "robosetup/srdf.hpp"

#include <algorithm>
#include <set>

#include "robosetup/error.hpp"
#include "robosetup/text.hpp"
#include "robosetup/xml.hpp"

namespace robosetup {

const PlanningGroup* SemanticModel::find_group(std::string_view name) const {
  for (const auto& g : groups) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const GroupState* SemanticModel::find_state(std::string_view name, std::string_view group) const {
  for (const auto& s : group_states) {
    if (s.name == name && (group.empty() || s.group == group)) return &s;
  }
  return nullptr;
}

const VirtualJoint* SemanticModel::sampled_virtual_joint() const {
  for (const auto& v : virtual_joints) {
    if (v.kind != VirtualJointKind::kFixed) return &v;
  }
  return nullptr;
}

namespace {

struct Members {
  std::set<std::size_t> joints;
  std::set<std::size_t> links;
};

void collect(const RobotModel& model, const SemanticModel& semantic, const PlanningGroup& group,
             std::vector<std::string>& stack, Members& out) {
  if (std::find(stack.begin(), stack.end(), group.name) != stack.end()) {
    std::string cycle;
    for (const auto& s : stack) cycle += s + " -> ";
    throw Error(ErrorCode::kValidation, "subgroup cycle: " + cycle + group.name, group.name);
  }
  stack.push_back(group.name);

  auto add_joint = [&](std::size_t j) {
    out.joints.insert(j);
    out.links.insert(*model.link_index(model.joints()[j].child_link));
  };
  for (const auto& name : group.joints) {
    const auto j = model.joint_index(name);
    if (!j) throw Error(ErrorCode::kValidation, "group '" + group.name + "' names unknown joint '" + name + "'", name);
    add_joint(*j);
  }
  for (const auto& name : group.links) {
    const auto l = model.link_index(name);
    if (!l) throw Error(ErrorCode::kValidation, "group '" + group.name + "' names unknown link '" + name + "'", name);
    out.links.insert(*l);
    if (const auto pj = model.parent_joint(*l)) out.joints.insert(*pj);
  }
  for (const auto& chain : group.chains) {
    const auto base = model.link_index(chain.base_link);
    const auto tip = model.link_index(chain.tip_link);
    if (!base || !tip || *base == *tip || !model.is_ancestor(*base, *tip)) {
      throw Error(ErrorCode::kValidation,
                  "chain " + chain.base_link + " -> " + chain.tip_link + " in group '" + group.name +
                      "' is not a path in the kinematic tree",
                  group.name);
    }
    for (std::size_t j : model.joints_to_root(*tip)) {
      const auto parent = *model.link_index(model.joints()[j].parent_link);
      if (model.is_ancestor(*base, parent)) add_joint(j);
    }
  }
  for (const auto& name : group.subgroups) {
    const PlanningGroup* sub = semantic.find_group(name);
    if (sub == nullptr) {
      throw Error(ErrorCode::kValidation, "group '" + group.name + "' names unknown subgroup '" + name + "'", name);
    }
    collect(model, semantic, *sub, stack, out);
  }
  stack.pop_back();
}

// Links in depth-first order: root, then children following the joint order.
std::vector<std::size_t> link_dfs_order(const RobotModel& model) {
  std::vector<std::size_t> order{model.root_index()};
  for (std::size_t j : model.joint_order()) order.push_back(*model.link_index(model.joints()[j].child_link));
  return order;
}

std::size_t link_depth(const RobotModel& model, std::size_t link) { return model.joints_to_root(link).size(); }

}  // namespace

JointGroup resolve_group(const RobotModel& model, const SemanticModel& semantic, std::string_view group_name) {
  const PlanningGroup* group = semantic.find_group(group_name);
  if (group == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown group '" + std::string(group_name) + "'", std::string(group_name));
  }
  Members members;
  std::vector<std::string> stack;
  collect(model, semantic, *group, stack, members);

  const std::set<std::string> passive(semantic.passive_joints.begin(), semantic.passive_joints.end());
  JointGroup out;
  out.name = group->name;
  for (const auto& name : model.active_joints()) {
    if (members.joints.count(*model.joint_index(name)) != 0 && passive.count(name) == 0) out.joints.push_back(name);
  }
  if (out.joints.empty()) {
    throw Error(ErrorCode::kValidation, "group '" + group->name + "' resolves to no active joints", group->name);
  }
  for (std::size_t l : link_dfs_order(model)) {
    if (members.links.count(l) != 0) out.links.push_back(model.links()[l].name);
  }

  // Serial when each joint hangs below the previous one with no skipped
  // movable joint in between (fixed, mimic and passive joints may sit there).
  std::set<std::string> movable(model.active_joints().begin(), model.active_joints().end());
  for (const auto& p : passive) movable.erase(p);
  out.is_chain = true;
  for (std::size_t k = 0; k + 1 < out.joints.size() && out.is_chain; ++k) {
    const auto child = *model.link_index(model.joint(out.joints[k]).child_link);
    auto link = *model.link_index(model.joint(out.joints[k + 1]).parent_link);
    if (!model.is_ancestor(child, link)) {
      out.is_chain = false;
      break;
    }
    while (link != child) {
      const Joint& up = model.joints()[*model.parent_joint(link)];
      if (movable.count(up.name) != 0) {
        out.is_chain = false;
        break;
      }
      link = *model.link_index(up.parent_link);
    }
  }
  if (out.is_chain) {
    // Deepest group link below the last joint.
    const auto last_child = *model.link_index(model.joint(out.joints.back()).child_link);
    std::size_t tip = last_child;
    for (std::size_t l : link_dfs_order(model)) {
      if (members.links.count(l) != 0 && model.is_ancestor(last_child, l) &&
          link_depth(model, l) > link_depth(model, tip)) {
        tip = l;
      }
    }
    out.tip_link = model.links()[tip].name;
  }
  return out;
}

ValidationReport validate_semantic(const RobotModel& model, const SemanticModel& semantic) {
  ValidationReport report;
  const std::set<std::string> passive(semantic.passive_joints.begin(), semantic.passive_joints.end());

  std::set<std::string> seen;
  std::map<std::string, JointGroup> resolved;
  for (const auto& g : semantic.groups) {
    if (g.name.empty()) report.add(Severity::kError, "group", "group has an empty name");
    if (!seen.insert(g.name).second) report.add(Severity::kError, g.name, "duplicate group name");
    try {
      resolved.emplace(g.name, resolve_group(model, semantic, g.name));
    } catch (const Error& e) {
      report.add(Severity::kError, g.name, e.what());
    }
    for (const auto& j : g.joints) {
      if (passive.count(j) != 0) report.add(Severity::kWarning, g.name + "/" + j, "group lists a passive joint");
    }
  }

  std::set<std::pair<std::string, std::string>> state_keys;
  for (const auto& s : semantic.group_states) {
    const std::string element = "group_state " + s.name;
    if (!state_keys.insert({s.group, s.name}).second) {
      report.add(Severity::kError, element, "duplicate pose name for group '" + s.group + "'");
    }
    auto it = resolved.find(s.group);
    if (it == resolved.end()) {
      if (semantic.find_group(s.group) == nullptr) report.add(Severity::kError, element, "unknown group '" + s.group + "'");
      continue;
    }
    std::set<std::string> expected;
    for (const auto& jn : it->second.joints) {
      const Joint& joint = model.joint(jn);
      for (const auto& v : joint.variable_names()) {
        expected.insert(v);
        auto val = s.values.find(v);
        if (val == s.values.end()) {
          report.add(Severity::kError, v, "pose '" + s.name + "' has no value for joint '" + v + "'");
        } else if (joint.has_position_limits() &&
                   (val->second < joint.limits->lower - 1e-9 || val->second > joint.limits->upper + 1e-9)) {
          report.add(Severity::kError, v, "pose '" + s.name + "' puts joint '" + v + "' outside its limits");
        }
      }
    }
    for (const auto& [v, value] : s.values) {
      if (expected.count(v) == 0) {
        report.add(Severity::kError, v, "pose '" + s.name + "' sets '" + v + "', which is not in group '" + s.group + "'");
      }
    }
  }

  std::set<std::string> eef_names;
  for (const auto& e : semantic.end_effectors) {
    const std::string element = "end_effector " + e.name;
    if (!eef_names.insert(e.name).second) report.add(Severity::kError, element, "duplicate end effector name");
    if (semantic.find_group(e.group) == nullptr) report.add(Severity::kError, element, "unknown group '" + e.group + "'");
    if (!model.link_index(e.parent_link)) {
      report.add(Severity::kError, element, "unknown parent link '" + e.parent_link + "'");
    }
    if (!e.parent_group.empty() && semantic.find_group(e.parent_group) == nullptr) {
      report.add(Severity::kError, element, "unknown parent group '" + e.parent_group + "'");
    }
    auto a = resolved.find(e.group);
    auto b = resolved.find(e.parent_group);
    if (a != resolved.end() && b != resolved.end()) {
      for (const auto& j : a->second.joints) {
        if (std::find(b->second.joints.begin(), b->second.joints.end(), j) != b->second.joints.end()) {
          report.add(Severity::kWarning, e.group + "/" + e.parent_group,
                     "end effector group '" + e.group + "' shares joint '" + j + "' with parent group '" +
                         e.parent_group + "'");
          break;
        }
      }
    }
  }

  std::set<std::string> vj_names;
  for (const auto& v : semantic.virtual_joints) {
    const std::string element = "virtual_joint " + v.name;
    if (!vj_names.insert(v.name).second) report.add(Severity::kError, element, "duplicate virtual joint name");
    if (model.joint_index(v.name)) report.add(Severity::kError, element, "name clashes with a model joint");
    if (!model.link_index(v.child_link)) {
      report.add(Severity::kError, element, "unknown child link '" + v.child_link + "'");
    } else if (v.child_link != model.root_link()) {
      report.add(Severity::kWarning, element, "child link '" + v.child_link + "' is not the model root");
    }
    try {
      for (const auto& [lo, hi] : v.effective_bounds()) {
        if (!(lo <= hi)) throw Error(ErrorCode::kValidation, "workspace bound lower exceeds upper");
      }
    } catch (const Error& e) {
      report.add(Severity::kError, element, e.what());
    }
  }

  for (const auto& p : semantic.passive_joints) {
    if (!model.joint_index(p)) report.add(Severity::kError, "passive_joint " + p, "unknown joint '" + p + "'");
  }
  for (const auto& [pair, entry] : semantic.disabled.entries()) {
    for (const auto* name : {&pair.first, &pair.second}) {
      if (!model.link_index(*name)) {
        report.add(Severity::kError, "disable_collisions " + pair.first + " " + pair.second,
                   "unknown link '" + *name + "'");
      }
    }
  }
  return report;
}

std::string serialize_srdf(const SemanticModel& semantic) {
  xml::Writer w;
  w.open("robot", {{"name", semantic.robot_name}});
  for (const auto& g : semantic.groups) {
    if (g.joints.empty() && g.links.empty() && g.chains.empty() && g.subgroups.empty()) {
      w.empty("group", {{"name", g.name}});
      continue;
    }
    w.open("group", {{"name", g.name}});
    for (const auto& l : g.links) w.empty("link", {{"name", l}});
    for (const auto& j : g.joints) w.empty("joint", {{"name", j}});
    for (const auto& c : g.chains) w.empty("chain", {{"base_link", c.base_link}, {"tip_link", c.tip_link}});
    for (const auto& s : g.subgroups) w.empty("group", {{"name", s}});
    w.close();
  }
  for (const auto& s : semantic.group_states) {
    w.open("group_state", {{"name", s.name}, {"group", s.group}});
    for (const auto& [j, v] : s.values) w.empty("joint", {{"name", j}, {"value", format_double(v)}});
    w.close();
  }
  for (const auto& e : semantic.end_effectors) {
    xml::Attrs a{{"name", e.name}, {"parent_link", e.parent_link}, {"group", e.group}};
    if (!e.parent_group.empty()) a.emplace_back("parent_group", e.parent_group);
    w.empty("end_effector", a);
  }
  for (const auto& v : semantic.virtual_joints) {
    xml::Attrs a{{"name", v.name},
                 {"type", std::string(to_string(v.kind))},
                 {"parent_frame", v.parent_frame},
                 {"child_link", v.child_link}};
    if (!v.bounds.empty()) {
      std::string text;
      for (const auto& [lo, hi] : v.bounds) {
        if (!text.empty()) text += ' ';
        text += format_double(lo) + ' ' + format_double(hi);
      }
      a.emplace_back("bounds", text);
    }
    w.empty("virtual_joint", a);
  }
  for (const auto& p : semantic.passive_joints) w.empty("passive_joint", {{"name", p}});
  for (const auto& [pair, entry] : semantic.disabled.entries()) {
    if (!entry.disabled) continue;
    xml::Attrs a{{"link1", pair.first}, {"link2", pair.second}, {"reason", std::string(to_string(entry.reason))}};
    if (entry.stats) {
      a.emplace_back("samples", std::to_string(entry.stats->samples));
      a.emplace_back("collisions", std::to_string(entry.stats->collisions));
    }
    w.empty("disable_collisions", a);
  }
  w.close();
  return w.str();
}

namespace {

const std::string& required(const xml::Element& e, std::string_view attr) {
  const std::string* v = e.attribute(attr);
  if (v == nullptr) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(e.line) + ": <" + e.name + "> is missing attribute '" + std::string(attr) + "'",
                e.name);
  }
  return *v;
}

void require_link(const RobotModel& model, const std::string& name, const xml::Element& e) {
  if (!model.link_index(name)) {
    throw Error(ErrorCode::kValidation,
                "line " + std::to_string(e.line) + ": <" + e.name + "> references unknown link '" + name + "'", name);
  }
}

void require_joint(const RobotModel& model, const std::string& name, const xml::Element& e) {
  if (!model.joint_index(name)) {
    throw Error(ErrorCode::kValidation,
                "line " + std::to_string(e.line) + ": <" + e.name + "> references unknown joint '" + name + "'", name);
  }
}

std::uint64_t parse_count(const std::string& text, const xml::Element& e) {
  const auto v = parse_int(text);
  if (!v || *v < 0) throw Error(ErrorCode::kParse, "line " + std::to_string(e.line) + ": bad count '" + text + "'", e.name);
  return static_cast<std::uint64_t>(*v);
}

}  // namespace

SemanticModel parse_srdf(std::string_view document, const RobotModel& model) {
  const auto root = xml::parse(document);
  if (root->name != "robot") throw Error(ErrorCode::kParse, "SRDF root element must be <robot>", root->name);
  SemanticModel s;
  s.robot_name = required(*root, "name");

  for (const auto& child : root->children) {
    const xml::Element& e = *child;
    if (e.name == "group") {
      PlanningGroup g;
      g.name = required(e, "name");
      for (const auto& m : e.children) {
        if (m->name == "joint") {
          g.joints.push_back(required(*m, "name"));
          require_joint(model, g.joints.back(), *m);
        } else if (m->name == "link") {
          g.links.push_back(required(*m, "name"));
          require_link(model, g.links.back(), *m);
        } else if (m->name == "chain") {
          g.chains.push_back({required(*m, "base_link"), required(*m, "tip_link")});
          require_link(model, g.chains.back().base_link, *m);
          require_link(model, g.chains.back().tip_link, *m);
        } else if (m->name == "group") {
          g.subgroups.push_back(required(*m, "name"));
        }
      }
      s.groups.push_back(std::move(g));
    } else if (e.name == "group_state") {
      GroupState gs;
      gs.name = required(e, "name");
      gs.group = required(e, "group");
      for (const xml::Element* j : e.children_named("joint")) {
        const std::string& name = required(*j, "name");
        const auto value = parse_double(required(*j, "value"));
        if (!value) throw Error(ErrorCode::kParse, "line " + std::to_string(j->line) + ": bad joint value", name);
        gs.values[name] = *value;
      }
      s.group_states.push_back(std::move(gs));
    } else if (e.name == "end_effector") {
      EndEffector eef{required(e, "name"), required(e, "group"), required(e, "parent_link"), {}};
      if (const auto* pg = e.attribute("parent_group")) eef.parent_group = *pg;
      require_link(model, eef.parent_link, e);
      s.end_effectors.push_back(std::move(eef));
    } else if (e.name == "virtual_joint") {
      VirtualJoint v;
      v.name = required(e, "name");
      const std::string& type = required(e, "type");
      if (type == "fixed") {
        v.kind = VirtualJointKind::kFixed;
      } else if (type == "planar") {
        v.kind = VirtualJointKind::kPlanar;
      } else if (type == "floating") {
        v.kind = VirtualJointKind::kFloating;
      } else {
        throw Error(ErrorCode::kParse, "line " + std::to_string(e.line) + ": unknown virtual joint type '" + type + "'",
                    v.name);
      }
      v.parent_frame = required(e, "parent_frame");
      v.child_link = required(e, "child_link");
      require_link(model, v.child_link, e);
      if (const auto* b = e.attribute("bounds")) {
        const auto tokens = split_ws(*b);
        if (tokens.size() % 2 != 0) throw Error(ErrorCode::kParse, "bounds need lower/upper pairs", v.name);
        for (std::size_t i = 0; i < tokens.size(); i += 2) {
          const auto lo = parse_double(tokens[i]);
          const auto hi = parse_double(tokens[i + 1]);
          if (!lo || !hi) throw Error(ErrorCode::kParse, "bad bounds value", v.name);
          v.bounds.emplace_back(*lo, *hi);
        }
      }
      s.virtual_joints.push_back(std::move(v));
    } else if (e.name == "passive_joint") {
      s.passive_joints.push_back(required(e, "name"));
      require_joint(model, s.passive_joints.back(), e);
    } else if (e.name == "disable_collisions") {
      const std::string& a = required(e, "link1");
      const std::string& b = required(e, "link2");
      require_link(model, a, e);
      require_link(model, b, e);
      AcmEntry entry;
      entry.disabled = true;
      const auto* reason = e.attribute("reason");
      try {
        entry.reason = reason != nullptr ? acm_reason_from_string(*reason) : AcmReason::kUser;
      } catch (const Error&) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(e.line) + ": unknown reason '" + *reason + "'", a + "/" + b);
      }
      const auto* samples = e.attribute("samples");
      const auto* collisions = e.attribute("collisions");
      if (samples != nullptr && collisions != nullptr) {
        entry.stats = PairStats{parse_count(*samples, e), parse_count(*collisions, e)};
      }
      s.disabled.set(a, b, entry);
    }
  }
  // Subgroup names resolve against the document itself.
  for (const auto& g : s.groups) {
    for (const auto& sub : g.subgroups) {
      if (s.find_group(sub) == nullptr) {
        throw Error(ErrorCode::kValidation, "group '" + g.name + "' references unknown subgroup '" + sub + "'", sub);
      }
    }
  }
  return s;
}

}  // namespace robosetup
