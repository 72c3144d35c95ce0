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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robosetup/robot_model.hpp"
#include "robosetup/rng.hpp"

namespace robosetup {

/// Joint positions keyed by state variable name (joint name for single-DOF
/// joints, "<joint>/x" style names for planar and floating joints).
struct RobotState {
  std::map<std::string, double> values;

  double at(const std::string& variable) const;
  bool operator==(const RobotState&) const = default;
};

enum class VirtualJointKind { kFixed, kPlanar, kFloating };

std::string_view to_string(VirtualJointKind kind);

/// Joint attaching the robot root to a world frame. Multi-DOF kinds carry
/// workspace bounds so they can be sampled.
struct VirtualJoint {
  std::string name;
  VirtualJointKind kind = VirtualJointKind::kFixed;
  std::string parent_frame = "world";
  std::string child_link;
  /// One (lower, upper) per variable; empty means the defaults
  /// (+-1 m per translation, full circle for rotations).
  std::vector<std::pair<double, double>> bounds;

  std::vector<std::string> variable_names() const;
  std::vector<std::pair<double, double>> effective_bounds() const;
  Pose pose(const RobotState& state) const;

  bool operator==(const VirtualJoint&) const = default;
};

/// Bounds of one sampled dimension.
struct VariableBounds {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  bool continuous = false;  // sampled over (-pi, pi]
  double weight = 1.0;

  double range() const;
};

/// A resolved planning group: active joints in chain or depth-first order.
struct JointGroup {
  std::string name;
  std::vector<std::string> joints;
  std::vector<std::string> links;
  bool is_chain = false;
  std::string tip_link;  // chains only
};

/// Group over every active joint of the model (plus the virtual joint, if any).
JointGroup whole_robot_group(const RobotModel& model, const VirtualJoint* virtual_joint = nullptr);

/// Sampling bounds for the variables of `group`, in group order. Throws
/// Error(kValidation) for unbounded joints.
std::vector<VariableBounds> group_bounds(const RobotModel& model, const JointGroup& group,
                                         const VirtualJoint* virtual_joint = nullptr);

/// Midpoint of limits, 0 for continuous joints; virtual joints at the bound midpoints.
RobotState default_state(const RobotModel& model, const VirtualJoint* virtual_joint = nullptr);

/// World pose of every link, indexed like model.links().
std::vector<Pose> link_poses(const RobotModel& model, const RobotState& state,
                             const VirtualJoint* virtual_joint = nullptr);

/// World pose of every link keyed by link name.
std::map<std::string, Pose> forward_kinematics(const RobotModel& model, const RobotState& state,
                                               const VirtualJoint* virtual_joint = nullptr);

/// Transform produced by moving `joint` to `value` (without its origin).
Pose joint_motion(const Joint& joint, std::span<const double> values);

/// Geometric Jacobian of `tip_link` (rows: linear, angular; world frame at
/// the tip origin), one column per group joint.
Eigen::MatrixXd jacobian(const RobotModel& model, const JointGroup& group, const RobotState& state,
                         const std::string& tip_link);

struct IkParams {
  double position_tolerance = 1e-4;
  double orientation_tolerance = 1e-3;
  int max_iterations = 200;
  double damping = 0.1;
  int restarts = 10;
  std::uint64_t seed = 0;

  void check() const;
};

struct IkResult {
  bool success = false;
  RobotState state;
  int iterations = 0;
  int restarts_used = 0;
  double position_error = 0.0;
  double orientation_error = 0.0;
};

/// Damped-least-squares IK for a chain group's tip link. Damping adapts
/// per step (raised on a rejected step, lowered on an accepted one), joints
/// pinned at a limit drop out of the step, and a stalled attempt restarts
/// from a random in-limit state. A failed search is a result, not an error.
IkResult solve_ik(const RobotModel& model, const JointGroup& group, const Pose& target, const RobotState& seed,
                  const IkParams& params);

/// Position and orientation distance between two poses.
std::pair<double, double> pose_error(const Pose& actual, const Pose& target);

/// Samples the group's variables uniformly; other variables come from `base`
/// (or the default state).
RobotState sample_random_state(const RobotModel& model, const JointGroup& group, Rng& rng,
                               const VirtualJoint* virtual_joint = nullptr, const RobotState* base = nullptr);

/// Diameter of the group's configuration box under the weighted L2 metric.
double space_extent(const RobotModel& model, const JointGroup& group, const VirtualJoint* virtual_joint = nullptr);
double space_extent(const std::vector<VariableBounds>& bounds);

/// Weighted L2 distance over the given variables.
double state_distance(const std::vector<VariableBounds>& bounds, const RobotState& a, const RobotState& b);

/// Linear interpolation of the given variables; all others are taken from `from`.
RobotState interpolate(const std::vector<VariableBounds>& bounds, const RobotState& from, const RobotState& to,
                       double t);

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

struct ProjectionSpec {
  std::vector<std::string> joints;
  std::vector<double> weights;
};

/// Orthogonal projection onto the (up to) two group joints nearest the root.
ProjectionSpec default_projection(const RobotModel& model, const JointGroup& group);
std::vector<double> project(const RobotState& state, const ProjectionSpec& spec);

}  // namespace robosetup
