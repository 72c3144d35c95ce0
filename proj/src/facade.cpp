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

#include "robosetup/facade.hpp"

#include "robosetup/error.hpp"

namespace robosetup {

namespace fs = std::filesystem;

namespace {

const std::string& bundle_file(const ConfigBundle& bundle, const std::string& path) {
  auto it = bundle.files.find(path);
  if (it == bundle.files.end()) throw Error(ErrorCode::kNotFound, "bundle has no " + path, path);
  return it->second;
}

void parse_configs(const ConfigBundle& files, LoadedBundle& b) {
  b.semantic = std::make_shared<SemanticModel>(parse_srdf(bundle_file(files, "config/" + b.demo.semantic), *b.model));
  b.planning = parse_planning(bundle_file(files, "config/planning.conf"));
  b.limits = parse_joint_limits(bundle_file(files, "config/joint_limits.yaml"));
  b.kinematics = parse_kinematics(bundle_file(files, "config/kinematics.conf"));
}

}  // namespace

LoadedBundle load_bundle(const fs::path& dir, const std::optional<fs::path>& urdf) {
  const ConfigBundle files = read_bundle(dir);
  LoadedBundle b;
  b.demo = parse_demo_manifest(bundle_file(files, "config/demo.manifest"));
  fs::path model_path = urdf ? *urdf : fs::path(b.demo.model);
  if (model_path.empty()) throw Error(ErrorCode::kNotFound, "demo.manifest names no model; pass the URDF explicitly");
  if (model_path.is_relative() && !urdf) model_path = dir / model_path;
  b.model = std::make_shared<RobotModel>(load_urdf_file(model_path));
  parse_configs(files, b);
  return b;
}

LoadedBundle load_bundle(const ConfigBundle& bundle, std::shared_ptr<const RobotModel> model) {
  LoadedBundle b;
  b.demo = parse_demo_manifest(bundle_file(bundle, "config/demo.manifest"));
  b.model = std::move(model);
  parse_configs(bundle, b);
  return b;
}

PlanRequest make_request(const LoadedBundle& bundle, const std::string& group) {
  PlanRequest r;
  r.group = group;
  r.planner = bundle.planning.planner;
  r.planner_params["goal_bias"] = bundle.planning.goal_bias;
  r.time_budget = bundle.planning.time_budget;
  r.resolution_fraction = bundle.planning.resolution_fraction;
  r.seed = bundle.planning.seed;
  r.adapters = bundle.planning.adapters;
  if (const auto* k = bundle.kinematics.find(group); k != nullptr && k->chain) {
    r.ik = k->params;
    if (k->solver != "none") r.ik_solver = k->solver;
  }
  for (const auto& j : bundle.limits.joints) r.limits[j.joint] = {j.max_velocity, j.max_acceleration};
  return r;
}

MotionFacade::MotionFacade(LoadedBundle bundle, PlanningSceneWorld world, const PluginRegistry* registry)
    : bundle_(std::move(bundle)), registry_(registry != nullptr ? registry : &PluginRegistry::global()) {
  scene_.model = bundle_.model;
  scene_.semantic = bundle_.semantic;
  scene_.acm = bundle_.semantic->disabled;
  scene_.world = std::move(world);
  current_ = default_state(*bundle_.model, scene_.virtual_joint());
}

void MotionFacade::set_current_state(const RobotState& state) {
  for (const auto& [k, v] : state.values) current_.values[k] = v;
}

Trajectory MotionFacade::plan_to(const std::string& named_pose, const std::string& group) {
  const GroupState* pose = bundle_.semantic->find_state(named_pose, group);
  if (pose == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown named pose '" + named_pose + "' for group '" + group + "'", named_pose);
  }
  PlanRequest r = make_request(bundle_, group);
  JointGoal goal;
  goal.state.values = pose->values;
  goal.tolerance = bundle_.planning.goal_tolerance;
  r.goal = goal;
  return run(std::move(r));
}

Trajectory MotionFacade::plan_to(const Pose& target, const std::string& group) {
  PlanRequest r = make_request(bundle_, group);
  r.goal = PoseGoal{target, {}};
  return run(std::move(r));
}

Trajectory MotionFacade::run(PlanRequest request) {
  request.start = current_;
  last_ = plan(scene_, request, *registry_);
  if (!last_.success) {
    throw Error(ErrorCode::kPlanFailed, "planning failed: " + last_.message, request.group);
  }
  if (!last_.trajectory) {
    std::vector<std::string> joints;
    for (const auto& b : group_bounds(*scene_.model, scene_.group(request.group), scene_.virtual_joint())) {
      joints.push_back(b.name);
    }
    return time_parameterize(joints, last_.path, resolve_limits(*scene_.model, joints, request.limits));
  }
  return *last_.trajectory;
}

}  // namespace robosetup
