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

#include "robosetup/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "robosetup/error.hpp"

namespace robosetup {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLimitSlack = 1e-9;

}  // namespace

double RobotState::at(const std::string& variable) const {
  auto it = values.find(variable);
  if (it == values.end()) {
    throw Error(ErrorCode::kValidation, "state has no value for '" + variable + "'", variable);
  }
  return it->second;
}

std::string_view to_string(VirtualJointKind kind) {
  switch (kind) {
    case VirtualJointKind::kFixed: return "fixed";
    case VirtualJointKind::kPlanar: return "planar";
    case VirtualJointKind::kFloating: return "floating";
  }
  return "fixed";
}

std::vector<std::string> VirtualJoint::variable_names() const {
  switch (kind) {
    case VirtualJointKind::kFixed: return {};
    case VirtualJointKind::kPlanar: return {name + "/x", name + "/y", name + "/theta"};
    case VirtualJointKind::kFloating:
      return {name + "/x", name + "/y", name + "/z", name + "/roll", name + "/pitch", name + "/yaw"};
  }
  return {};
}

std::vector<std::pair<double, double>> VirtualJoint::effective_bounds() const {
  const auto names = variable_names();
  if (!bounds.empty()) {
    if (bounds.size() != names.size()) {
      throw Error(ErrorCode::kValidation, "virtual joint '" + name + "' needs " + std::to_string(names.size()) +
                                              " workspace bounds", name);
    }
    return bounds;
  }
  std::vector<std::pair<double, double>> out;
  if (kind == VirtualJointKind::kPlanar) {
    out = {{-1.0, 1.0}, {-1.0, 1.0}, {-kPi, kPi}};
  } else if (kind == VirtualJointKind::kFloating) {
    out = {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-kPi, kPi}, {-kPi, kPi}, {-kPi, kPi}};
  }
  return out;
}

Pose VirtualJoint::pose(const RobotState& state) const {
  const auto names = variable_names();
  if (kind == VirtualJointKind::kPlanar) {
    return Pose::from_xyz_rpy({state.at(names[0]), state.at(names[1]), 0.0}, {0.0, 0.0, state.at(names[2])});
  }
  if (kind == VirtualJointKind::kFloating) {
    return Pose::from_xyz_rpy({state.at(names[0]), state.at(names[1]), state.at(names[2])},
                              {state.at(names[3]), state.at(names[4]), state.at(names[5])});
  }
  return Pose::identity();
}

double VariableBounds::range() const { return continuous ? 2.0 * kPi : upper - lower; }

double normalize_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

JointGroup whole_robot_group(const RobotModel& model, const VirtualJoint* virtual_joint) {
  JointGroup g;
  g.name = "whole_robot";
  if (virtual_joint != nullptr && virtual_joint->kind != VirtualJointKind::kFixed) {
    g.joints.push_back(virtual_joint->name);
  }
  for (const auto& j : model.active_joints()) g.joints.push_back(j);
  for (const auto& l : model.links()) g.links.push_back(l.name);
  return g;
}

std::vector<VariableBounds> group_bounds(const RobotModel& model, const JointGroup& group,
                                         const VirtualJoint* virtual_joint) {
  std::vector<VariableBounds> out;
  for (const auto& name : group.joints) {
    if (virtual_joint != nullptr && name == virtual_joint->name) {
      const auto names = virtual_joint->variable_names();
      const auto bounds = virtual_joint->effective_bounds();
      for (std::size_t i = 0; i < names.size(); ++i) {
        out.push_back({names[i], bounds[i].first, bounds[i].second, false, 1.0});
      }
      continue;
    }
    const Joint& joint = model.joint(name);
    switch (joint.kind) {
      case JointKind::kRevolute:
      case JointKind::kPrismatic:
        out.push_back({joint.name, joint.limits->lower, joint.limits->upper, false, 1.0});
        break;
      case JointKind::kContinuous:
        out.push_back({joint.name, -kPi, kPi, true, 1.0});
        break;
      case JointKind::kFixed:
        break;
      case JointKind::kFloating:
      case JointKind::kPlanar:
        throw Error(ErrorCode::kValidation,
                    "joint '" + joint.name + "' is unbounded; declare it as a virtual joint with workspace bounds",
                    joint.name);
    }
  }
  return out;
}

RobotState default_state(const RobotModel& model, const VirtualJoint* virtual_joint) {
  RobotState s;
  for (const auto& name : model.active_joints()) {
    const Joint& joint = model.joint(name);
    if (joint.has_position_limits()) {
      s.values[name] = 0.5 * (joint.limits->lower + joint.limits->upper);
    } else {
      for (const auto& v : joint.variable_names()) s.values[v] = 0.0;
    }
  }
  if (virtual_joint != nullptr) {
    const auto names = virtual_joint->variable_names();
    const auto bounds = virtual_joint->effective_bounds();
    for (std::size_t i = 0; i < names.size(); ++i) s.values[names[i]] = 0.5 * (bounds[i].first + bounds[i].second);
  }
  return s;
}

Pose joint_motion(const Joint& joint, std::span<const double> v) {
  Pose m;
  switch (joint.kind) {
    case JointKind::kRevolute:
    case JointKind::kContinuous:
      m.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(v[0], joint.axis));
      break;
    case JointKind::kPrismatic:
      m.translation = joint.axis * v[0];
      break;
    case JointKind::kPlanar: {
      // Motion in the plane normal to the axis.
      const Vec3 n = joint.axis;
      const Vec3 u = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
      const Vec3 w = n.cross(u);
      m.translation = u * v[0] + w * v[1];
      m.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(v[2], n));
      break;
    }
    case JointKind::kFloating:
      m = Pose::from_xyz_rpy({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
      break;
    case JointKind::kFixed:
      break;
  }
  return m;
}

std::vector<Pose> link_poses(const RobotModel& model, const RobotState& state, const VirtualJoint* virtual_joint) {
  std::vector<Pose> poses(model.links().size());
  poses[model.root_index()] = virtual_joint != nullptr ? virtual_joint->pose(state) : Pose::identity();
  std::vector<double> values;
  for (std::size_t j : model.joint_order()) {
    const Joint& joint = model.joints()[j];
    values.clear();
    for (const auto& var : joint.variable_names()) values.push_back(state.at(var));
    if (joint.has_position_limits() && !values.empty()) {
      const double q = values[0];
      if (q < joint.limits->lower - kLimitSlack || q > joint.limits->upper + kLimitSlack) {
        throw Error(ErrorCode::kValidation,
                    "joint '" + joint.name + "' value " + std::to_string(q) + " outside limits [" +
                        std::to_string(joint.limits->lower) + ", " + std::to_string(joint.limits->upper) + "]",
                    joint.name);
      }
    }
    const std::size_t parent = *model.link_index(joint.parent_link);
    const std::size_t child = *model.link_index(joint.child_link);
    Pose local = joint.origin;
    if (!values.empty()) local = local * joint_motion(joint, values);
    poses[child] = poses[parent] * local;
  }
  return poses;
}

std::map<std::string, Pose> forward_kinematics(const RobotModel& model, const RobotState& state,
                                               const VirtualJoint* virtual_joint) {
  const auto poses = link_poses(model, state, virtual_joint);
  std::map<std::string, Pose> out;
  for (std::size_t i = 0; i < poses.size(); ++i) out.emplace(model.links()[i].name, poses[i]);
  return out;
}

namespace {

Eigen::MatrixXd jacobian_from_poses(const RobotModel& model, const JointGroup& group, const std::vector<Pose>& poses,
                                    std::size_t tip) {
  const auto path = model.joints_to_root(tip);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(group.joints.size()));
  const Vec3 p_tip = poses[tip].translation;
  for (std::size_t c = 0; c < group.joints.size(); ++c) {
    const auto idx = model.joint_index(group.joints[c]);
    if (!idx) throw Error(ErrorCode::kValidation, "jacobian supports model joints only", group.joints[c]);
    if (std::find(path.begin(), path.end(), *idx) == path.end()) {
      throw Error(ErrorCode::kValidation,
                  "tip link '" + model.links()[tip].name + "' is not driven by group joint '" + group.joints[c] + "'",
                  group.joints[c]);
    }
    const Joint& joint = model.joints()[*idx];
    const Pose frame = poses[*model.link_index(joint.parent_link)] * joint.origin;
    const Vec3 axis = frame.rotation * joint.axis;
    const auto col = static_cast<Eigen::Index>(c);
    switch (joint.kind) {
      case JointKind::kRevolute:
      case JointKind::kContinuous:
        jac.block<3, 1>(0, col) = axis.cross(p_tip - frame.translation);
        jac.block<3, 1>(3, col) = axis;
        break;
      case JointKind::kPrismatic:
        jac.block<3, 1>(0, col) = axis;
        break;
      default:
        throw Error(ErrorCode::kValidation, "jacobian supports single-DOF joints only", joint.name);
    }
  }
  return jac;
}

}  // namespace

Eigen::MatrixXd jacobian(const RobotModel& model, const JointGroup& group, const RobotState& state,
                         const std::string& tip_link) {
  const auto tip = model.link_index(tip_link);
  if (!tip) throw Error(ErrorCode::kNotFound, "unknown tip link '" + tip_link + "'", tip_link);
  return jacobian_from_poses(model, group, link_poses(model, state), *tip);
}

void IkParams::check() const {
  if (!(position_tolerance > 0.0) || !(orientation_tolerance > 0.0)) {
    throw Error(ErrorCode::kValidation, "IK tolerances must be positive");
  }
  if (max_iterations < 1) throw Error(ErrorCode::kValidation, "IK needs at least one iteration");
  if (!(damping > 0.0)) throw Error(ErrorCode::kValidation, "IK damping must be positive");
  if (restarts < 0) throw Error(ErrorCode::kValidation, "IK restart count must be nonnegative");
}

std::pair<double, double> pose_error(const Pose& actual, const Pose& target) {
  const double dp = (target.translation - actual.translation).norm();
  const double dot = std::min(1.0, std::abs(actual.rotation.dot(target.rotation)));
  return {dp, 2.0 * std::acos(dot)};
}

IkResult solve_ik(const RobotModel& model, const JointGroup& group, const Pose& target, const RobotState& seed,
                  const IkParams& params) {
  params.check();
  if (!group.is_chain || group.tip_link.empty()) {
    throw Error(ErrorCode::kValidation, "IK requires a serial chain group", group.name);
  }
  const auto tip = model.link_index(group.tip_link);
  if (!tip) throw Error(ErrorCode::kNotFound, "unknown tip link '" + group.tip_link + "'", group.tip_link);
  const auto bounds = group_bounds(model, group);
  const auto n = static_cast<Eigen::Index>(bounds.size());

  auto clamp_into = [&](Eigen::VectorXd& q) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& b = bounds[static_cast<std::size_t>(i)];
      q[i] = b.continuous ? normalize_angle(q[i]) : std::clamp(q[i], b.lower, b.upper);
    }
  };

  RobotState state = seed;
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = state.at(bounds[static_cast<std::size_t>(i)].name);
  clamp_into(q);

  Rng rng(params.seed);
  IkResult result;
  auto evaluate = [&](const Eigen::VectorXd& qv, std::vector<Pose>& poses) {
    for (Eigen::Index i = 0; i < n; ++i) state.values[bounds[static_cast<std::size_t>(i)].name] = qv[i];
    poses = link_poses(model, state);
    return pose_error(poses[*tip], target);
  };
  constexpr double kMaxErr = 0.5;
  for (int attempt = 0; attempt <= params.restarts; ++attempt) {
    std::vector<Pose> poses;
    auto [pe, oe] = evaluate(q, poses);
    double lambda = params.damping;
    for (int it = 0; it < params.max_iterations; ++it) {
      ++result.iterations;
      result.position_error = pe;
      result.orientation_error = oe;
      if (pe <= params.position_tolerance && oe <= params.orientation_tolerance) {
        result.success = true;
        result.state = state;
        result.restarts_used = attempt;
        return result;
      }
      const Pose& current = poses[*tip];
      Eigen::Matrix<double, 6, 1> err;
      err.head<3>() = target.translation - current.translation;
      const Eigen::AngleAxisd rot(target.rotation * current.rotation.conjugate());
      err.tail<3>() = rot.axis() * rot.angle();
      // large errors make DLS overshoot; cap the step target
      if (err.norm() > kMaxErr) err *= kMaxErr / err.norm();
      const Eigen::MatrixXd jac = jacobian_from_poses(model, group, poses, *tip);
      const double before = pe * pe + oe * oe;
      bool improved = false;
      // Levenberg-Marquardt style: raise damping on failure, lower on success
      for (int tries = 0; tries < 8 && !improved; ++tries) {
        Eigen::MatrixXd active = jac;
        Eigen::VectorXd dq;
        // joints pinned at a limit and pushed outward leave the active set
        for (Eigen::Index pass = 0; pass <= n; ++pass) {
          const Eigen::Matrix<double, 6, 6> jjt =
              active * active.transpose() + lambda * lambda * Eigen::Matrix<double, 6, 6>::Identity();
          dq = active.transpose() * jjt.ldlt().solve(err);
          bool pinned = false;
          for (Eigen::Index i = 0; i < n; ++i) {
            const auto& b = bounds[static_cast<std::size_t>(i)];
            if (b.continuous || active.col(i).isZero()) continue;
            if ((q[i] <= b.lower + 1e-12 && dq[i] < 0.0) || (q[i] >= b.upper - 1e-12 && dq[i] > 0.0)) {
              active.col(i).setZero();
              pinned = true;
            }
          }
          if (!pinned) break;
        }
        Eigen::VectorXd trial = q + dq;
        clamp_into(trial);
        std::vector<Pose> trial_poses;
        const auto [tpe, toe] = evaluate(trial, trial_poses);
        if (tpe * tpe + toe * toe < before) {
          q = trial;
          poses = std::move(trial_poses);
          pe = tpe;
          oe = toe;
          improved = true;
          lambda = std::max(lambda * 0.5, params.damping * 0.01);
        } else {
          lambda *= 3.0;
        }
      }
      if (!improved) {
        evaluate(q, poses);
        break;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& b = bounds[static_cast<std::size_t>(i)];
      q[i] = b.continuous ? kPi - 2.0 * kPi * rng.uniform01() : rng.uniform(b.lower, b.upper);
    }
  }
  result.state = state;
  result.restarts_used = params.restarts;
  return result;
}

RobotState sample_random_state(const RobotModel& model, const JointGroup& group, Rng& rng,
                               const VirtualJoint* virtual_joint, const RobotState* base) {
  RobotState s = base != nullptr ? *base : default_state(model, virtual_joint);
  for (const auto& b : group_bounds(model, group, virtual_joint)) {
    s.values[b.name] = b.continuous ? kPi - 2.0 * kPi * rng.uniform01() : rng.uniform(b.lower, b.upper);
  }
  return s;
}

double space_extent(const std::vector<VariableBounds>& bounds) {
  double sum = 0.0;
  for (const auto& b : bounds) sum += b.weight * b.range() * b.range();
  return std::sqrt(sum);
}

double space_extent(const RobotModel& model, const JointGroup& group, const VirtualJoint* virtual_joint) {
  return space_extent(group_bounds(model, group, virtual_joint));
}

double state_distance(const std::vector<VariableBounds>& bounds, const RobotState& a, const RobotState& b) {
  double sum = 0.0;
  for (const auto& v : bounds) {
    const double d = a.at(v.name) - b.at(v.name);
    sum += v.weight * d * d;
  }
  return std::sqrt(sum);
}

RobotState interpolate(const std::vector<VariableBounds>& bounds, const RobotState& from, const RobotState& to,
                       double t) {
  RobotState out = from;
  for (const auto& v : bounds) {
    const double a = from.at(v.name);
    out.values[v.name] = a + t * (to.at(v.name) - a);
  }
  return out;
}

ProjectionSpec default_projection(const RobotModel&, const JointGroup& group) {
  if (group.joints.empty()) throw Error(ErrorCode::kValidation, "group has no joints", group.name);
  ProjectionSpec spec;
  const std::size_t k = std::min<std::size_t>(2, group.joints.size());
  spec.joints.assign(group.joints.begin(), group.joints.begin() + static_cast<std::ptrdiff_t>(k));
  spec.weights.assign(k, 1.0);
  return spec;
}

std::vector<double> project(const RobotState& state, const ProjectionSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.joints.size());
  for (const auto& j : spec.joints) out.push_back(state.at(j));
  return out;
}

}  // namespace robosetup
