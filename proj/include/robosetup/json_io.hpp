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

#include <json.hpp>

#include "robosetup/collision.hpp"
#include "robosetup/kinematics.hpp"

namespace robosetup {

using Json = nlohmann::ordered_json;

/// Flat {variable: value} object.
Json state_to_json(const RobotState& state);
RobotState state_from_json(const Json& json);

/// {"xyz": [...], "quat": [x, y, z, w], "rpy": [...]}
Json pose_to_json(const Pose& pose);
/// Accepts "xyz" with either "quat" or "rpy".
Pose pose_from_json(const Json& json);

/// {"type": "sphere", "radius": r} | {"type": "box", "size": [..]} |
/// {"type": "cylinder", "radius": r, "length": l} | {"type": "mesh", "vertices": [[..], ..]}
Json shape_to_json(const Shape& shape);
Shape shape_from_json(const Json& json);

/// Scene file: {"objects": [{"name", "shape", "pose": {"xyz", "rpy"}}]}
Json world_to_json(const PlanningSceneWorld& world);
PlanningSceneWorld world_from_json(const Json& json);

}  // namespace robosetup
