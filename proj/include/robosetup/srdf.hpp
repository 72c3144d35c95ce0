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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "robosetup/collision.hpp"
#include "robosetup/kinematics.hpp"
#include "robosetup/robot_model.hpp"
#include "robosetup/validation.hpp"

namespace robosetup {

struct ChainSpec {
  std::string base_link;
  std::string tip_link;

  bool operator==(const ChainSpec&) const = default;
};

/// Group members as declared; resolve_group flattens them.
struct PlanningGroup {
  std::string name;
  std::vector<std::string> joints;
  std::vector<std::string> links;
  std::vector<ChainSpec> chains;
  std::vector<std::string> subgroups;

  bool operator==(const PlanningGroup&) const = default;
};

/// Named pose holding values for the group's joints only.
struct GroupState {
  std::string name;
  std::string group;
  std::map<std::string, double> values;

  bool operator==(const GroupState&) const = default;
};

struct EndEffector {
  std::string name;
  std::string group;
  std::string parent_link;
  std::string parent_group;  // empty when unset

  bool operator==(const EndEffector&) const = default;
};

struct SemanticModel {
  std::string robot_name;
  std::vector<PlanningGroup> groups;
  std::vector<GroupState> group_states;
  std::vector<EndEffector> end_effectors;
  std::vector<VirtualJoint> virtual_joints;
  std::vector<std::string> passive_joints;
  AllowedCollisionMatrix disabled;

  const PlanningGroup* find_group(std::string_view name) const;
  const GroupState* find_state(std::string_view name, std::string_view group = {}) const;
  /// The first non-fixed virtual joint, if any (used for sampling the base).
  const VirtualJoint* sampled_virtual_joint() const;

  bool operator==(const SemanticModel&) const = default;
};

/// Flattens a group: joints in chain order when the result is a serial
/// chain, depth-first model order otherwise; passive and fixed joints are
/// dropped from the active set. Throws Error(kNotFound) for unknown groups
/// and Error(kValidation) for unresolvable chains, subgroup cycles and empty
/// results.
JointGroup resolve_group(const RobotModel& model, const SemanticModel& semantic, std::string_view group_name);

ValidationReport validate_semantic(const RobotModel& model, const SemanticModel& semantic);

/// Byte-deterministic SRDF text. Disabled pairs come out in lexicographic
/// order; doubles in shortest round-trip form. Virtual-joint bounds and ACM
/// statistics travel in the extension attributes `bounds`, `samples` and
/// `collisions`.
std::string serialize_srdf(const SemanticModel& semantic);

/// Parses SRDF text; every joint and link reference must resolve in `model`.
SemanticModel parse_srdf(std::string_view document, const RobotModel& model);

}  // namespace robosetup
