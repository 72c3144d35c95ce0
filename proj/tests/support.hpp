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

// Fixture loading and small helpers shared by the test binaries.

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "robosetup/confgen.hpp"
#include "robosetup/kinematics.hpp"
#include "robosetup/robot_model.hpp"
#include "robosetup/srdf.hpp"

namespace testing_support {

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(ROBOSETUP_DATA_DIR) / name;
}

inline std::shared_ptr<const robosetup::RobotModel> model(const std::string& urdf) {
  return std::make_shared<robosetup::RobotModel>(robosetup::load_urdf_file(data(urdf)));
}

inline robosetup::SemanticModel semantic(const robosetup::RobotModel& m, const std::string& srdf) {
  return robosetup::parse_srdf(robosetup::read_text_file(data(srdf)), m);
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("robosetup-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Uniform in-limit state over every active joint.
inline robosetup::RobotState random_state(const robosetup::RobotModel& m, robosetup::Rng& rng) {
  return robosetup::sample_random_state(m, robosetup::whole_robot_group(m), rng);
}

}  // namespace testing_support
