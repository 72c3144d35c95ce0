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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "robosetup/geometry.hpp"
#include "robosetup/validation.hpp"

namespace robosetup {

enum class JointKind { kFixed, kRevolute, kContinuous, kPrismatic, kFloating, kPlanar };

std::string_view to_string(JointKind kind);

struct JointLimits {
  double lower = 0.0;
  double upper = 0.0;
  double max_velocity = 0.0;  // 0 when the document gives none
  double max_effort = 0.0;
};

struct Geometry {
  Shape shape;
  Pose origin;
};

struct Link {
  std::string name;
  std::vector<Geometry> collision;
  std::vector<Geometry> visual;
  std::optional<double> mass;  // passed through, unused by planning
};

struct Joint {
  std::string name;
  JointKind kind = JointKind::kFixed;
  std::string parent_link;
  std::string child_link;
  Pose origin;
  Vec3 axis = Vec3::UnitX();
  std::optional<JointLimits> limits;
  bool mimic = false;

  /// True for joints with a bounded scalar position (revolute, prismatic).
  bool has_position_limits() const {
    return kind == JointKind::kRevolute || kind == JointKind::kPrismatic;
  }
  /// Names of the state variables this joint contributes.
  std::vector<std::string> variable_names() const;
};

/// Immutable kinematic tree. Construction checks the tree invariants and
/// throws Error naming the offending element.
class RobotModel {
 public:
  RobotModel(std::string name, std::vector<Link> links, std::vector<Joint> joints,
             std::vector<std::string> warnings = {});

  const std::string& name() const { return name_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::string& root_link() const { return links_[root_].name; }
  std::size_t root_index() const { return root_; }
  /// Non-fixed, non-mimic joints in depth-first order from the root.
  const std::vector<std::string>& active_joints() const { return active_joints_; }
  /// State variable names of the active joints, in the same order.
  const std::vector<std::string>& variable_names() const { return variables_; }
  /// All joint indices in depth-first order (parents before children).
  const std::vector<std::size_t>& joint_order() const { return joint_order_; }
  /// Parse-time notes, e.g. ignored elements.
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::optional<std::size_t> link_index(std::string_view name) const;
  std::optional<std::size_t> joint_index(std::string_view name) const;
  const Link& link(std::string_view name) const;
  const Joint& joint(std::string_view name) const;
  /// Index of the joint whose child is `link`; nullopt for the root.
  std::optional<std::size_t> parent_joint(std::size_t link) const { return parent_joint_[link]; }
  const std::vector<std::size_t>& child_joints(std::size_t link) const { return child_joints_[link]; }
  /// Joints on the path from the root to `link`, root first.
  std::vector<std::size_t> joints_to_root(std::size_t link) const;
  /// True if `ancestor` lies on the path from the root to `link` (inclusive).
  bool is_ancestor(std::size_t ancestor, std::size_t link) const;
  std::size_t depth() const;

 private:
  std::string name_;
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::vector<std::string> warnings_;
  std::size_t root_ = 0;
  std::vector<std::string> active_joints_;
  std::vector<std::string> variables_;
  std::vector<std::size_t> joint_order_;
  std::vector<std::optional<std::size_t>> parent_joint_;
  std::vector<std::vector<std::size_t>> child_joints_;
  std::unordered_map<std::string, std::size_t> link_lookup_;
  std::unordered_map<std::string, std::size_t> joint_lookup_;
};

/// Parses the planning-relevant URDF subset. Mesh paths resolve against
/// `asset_root` and are loaded as convex hulls.
RobotModel parse_urdf(std::string_view document, const std::filesystem::path& asset_root = {});
RobotModel load_urdf_file(const std::filesystem::path& file,
                          const std::optional<std::filesystem::path>& asset_root = std::nullopt);

ValidationReport validate_model(const RobotModel& model);

using LinkPair = std::pair<std::string, std::string>;

/// Unordered pairs (first < second) of links that both carry collision
/// geometry, in lexicographic order.
std::vector<LinkPair> collidable_pairs(const RobotModel& model);

}  // namespace robosetup
