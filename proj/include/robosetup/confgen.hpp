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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robosetup/json_io.hpp"
#include "robosetup/kinematics.hpp"
#include "robosetup/robot_model.hpp"
#include "robosetup/srdf.hpp"

namespace robosetup {

struct GenOptions {
  double velocity_scaling = 1.0;      // applied to every emitted velocity limit, in (0, 1]
  double default_velocity = 1.0;      // when the URDF gives none
  double default_acceleration = 1.0;  // URDF has no acceleration limits
  /// Solver per group; groups not listed use "dls".
  std::map<std::string, std::string> kinematics_solver;
  IkParams ik;
  std::string planner = "rrt";
  double goal_bias = 0.05;
  double time_budget = 5.0;
  double goal_tolerance = 1e-3;
  double resolution_fraction = 0.01;
  std::uint64_t planner_seed = 0;
  std::optional<std::uint64_t> acm_seed;  // echoed from ACM generation
  std::vector<std::string> adapters{"fix_start_bounds", "time_parameterization"};
  std::string model_path;  // recorded in demo.manifest and benchmark.conf
  std::string service_host = "127.0.0.1";
  int service_port = 8080;

  void check() const;
};

// ---------------------------------------------------------------------------
// The individual config files, as data. Each has a text form that the
// generator emits and a parser that reloads edited files.
// ---------------------------------------------------------------------------

struct JointLimitEntry {
  std::string joint;
  double max_velocity = 0.0;
  double max_acceleration = 0.0;

  bool operator==(const JointLimitEntry&) const = default;
};

struct JointLimitsConfig {
  std::vector<JointLimitEntry> joints;

  const JointLimitEntry* find(std::string_view joint) const;
  bool operator==(const JointLimitsConfig&) const = default;
};

struct KinematicsGroupConfig {
  std::string group;
  bool chain = false;
  std::string solver;  // "none" for non-chain groups
  std::string tip_link;
  IkParams params;

  bool operator==(const KinematicsGroupConfig& o) const;
};

struct KinematicsConfig {
  std::vector<KinematicsGroupConfig> groups;

  const KinematicsGroupConfig* find(std::string_view group) const;
  bool operator==(const KinematicsConfig&) const = default;
};

struct GroupProjection {
  std::string group;
  std::vector<std::string> joints;
  double space_extent = 0.0;

  bool operator==(const GroupProjection&) const = default;
};

struct PlanningConfig {
  std::string planner = "rrt";
  double goal_bias = 0.05;
  double time_budget = 5.0;
  double goal_tolerance = 1e-3;
  double resolution_fraction = 0.01;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> acm_seed;
  std::vector<std::string> adapters;
  std::vector<GroupProjection> groups;

  bool operator==(const PlanningConfig&) const = default;
};

struct DemoManifest {
  std::string model;
  std::string semantic;
  std::string service_host;
  int service_port = 0;
  std::string demo_group;
  std::vector<std::string> steps;

  bool operator==(const DemoManifest&) const = default;
};

std::string joint_limits_to_text(const JointLimitsConfig& config);
JointLimitsConfig parse_joint_limits(std::string_view text);
std::string kinematics_to_text(const KinematicsConfig& config);
KinematicsConfig parse_kinematics(std::string_view text);
std::string planning_to_text(const PlanningConfig& config);
PlanningConfig parse_planning(std::string_view text);
std::string demo_manifest_to_text(const DemoManifest& manifest);
DemoManifest parse_demo_manifest(std::string_view text);

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

struct BundleFile {
  std::string path;    // relative, e.g. "config/planning.conf"
  std::string sha256;  // lowercase hex of the content

  bool operator==(const BundleFile&) const = default;
};

struct ConfigBundle {
  std::map<std::string, std::string> files;
  std::vector<BundleFile> manifest;  // generation order
  std::string inputs_digest;

  Json manifest_json() const;
};

std::string sha256_hex(std::string_view data);

/// Canonical text of everything planning-relevant in a model; hashed into
/// the bundle's inputs digest.
std::string model_fingerprint(const RobotModel& model);

/// The six config files. Throws Error(kValidation) when the semantic model
/// has validation errors or an option is out of range.
ConfigBundle generate_bundle(const RobotModel& model, const SemanticModel& semantic, const GenOptions& options);

/// Writes each file via a temporary file and rename. Without `overwrite`, an
/// existing target aborts the whole write with Error(kConflict) before
/// anything is touched.
std::vector<std::filesystem::path> write_bundle(const ConfigBundle& bundle, const std::filesystem::path& directory,
                                                bool overwrite = false);

/// Reads a bundle directory back (files listed in the manifest order).
ConfigBundle read_bundle(const std::filesystem::path& directory);

std::string read_text_file(const std::filesystem::path& file);
/// Atomic single-file write (temp + rename).
void write_text_file(const std::filesystem::path& file, std::string_view content);

}  // namespace robosetup
