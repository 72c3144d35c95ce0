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
#include <memory>
#include <optional>
#include <string>

#include "robosetup/confgen.hpp"
#include "robosetup/planning.hpp"

namespace robosetup {

/// A generated bundle loaded back from disk.
struct LoadedBundle {
  std::shared_ptr<const RobotModel> model;
  std::shared_ptr<const SemanticModel> semantic;
  PlanningConfig planning;
  JointLimitsConfig limits;
  KinematicsConfig kinematics;
  DemoManifest demo;
};

/// Reads `<dir>/config/*`. The URDF comes from demo.manifest (relative paths
/// resolve against `dir`) unless `urdf` is given.
LoadedBundle load_bundle(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& urdf = {});
/// Same, from an in-memory bundle and an already loaded model.
LoadedBundle load_bundle(const ConfigBundle& bundle, std::shared_ptr<const RobotModel> model);

/// Request defaults for `group` taken from the bundle's config files.
PlanRequest make_request(const LoadedBundle& bundle, const std::string& group);

/// One-call planning against a loaded project: goal resolution (named pose
/// or IK), planning, adapters, trajectory.
class MotionFacade {
 public:
  explicit MotionFacade(LoadedBundle bundle, PlanningSceneWorld world = {},
                        const PluginRegistry* registry = nullptr);

  const RobotState& current_state() const { return current_; }
  void set_current_state(const RobotState& state);

  /// Throws Error(kNotFound) for unknown poses and Error(kPlanFailed) when
  /// the planner gives up.
  Trajectory plan_to(const std::string& named_pose, const std::string& group);
  Trajectory plan_to(const Pose& target, const std::string& group);

  const PlanResponse& last_response() const { return last_; }
  const PlanningScene& scene() const { return scene_; }
  const LoadedBundle& bundle() const { return bundle_; }

 private:
  Trajectory run(PlanRequest request);

  LoadedBundle bundle_;
  PlanningScene scene_;
  const PluginRegistry* registry_;
  RobotState current_;
  PlanResponse last_;
};

}  // namespace robosetup
