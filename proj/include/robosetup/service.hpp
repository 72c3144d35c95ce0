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

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "robosetup/acm_gen.hpp"
#include "robosetup/confgen.hpp"
#include "robosetup/error.hpp"
#include "robosetup/json_io.hpp"
#include "robosetup/planning.hpp"
#include "robosetup/srdf.hpp"

namespace robosetup {

// JSON forms of the semantic entities, shared by the service and the CLI.
Json group_to_json(const PlanningGroup& group);
PlanningGroup group_from_json(const Json& json);
Json group_state_to_json(const GroupState& state);
GroupState group_state_from_json(const Json& json);
Json end_effector_to_json(const EndEffector& eef);
EndEffector end_effector_from_json(const Json& json);
Json virtual_joint_to_json(const VirtualJoint& vj);
VirtualJoint virtual_joint_from_json(const Json& json);
Json report_to_json(const ValidationReport& report);
Json trajectory_to_json(const Trajectory& trajectory);
/// {"code", "message", "element"?}
Json error_to_json(const Error& error);
int http_status(ErrorCode code);

/// The one robot the service works on.
struct Project {
  std::shared_ptr<const RobotModel> model;
  std::optional<std::filesystem::path> model_path;  // absolute, when loaded from a file
  SemanticModel semantic;
  std::optional<AcmReport> acm;
  PlanningSceneWorld world;
  GenOptions options;
  RobotState state;  // for state export/import
};

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// HTTP+JSON front end over the library. `handle` is the whole API and runs
/// without sockets; `serve` puts it behind a listening port.
///
/// Reads share a lock, mutations take it exclusively. Every semantic edit is
/// validated on a copy and only committed when it adds no new errors.
class Service {
 public:
  explicit Service(const PluginRegistry* registry = nullptr);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpReply handle(std::string_view method, std::string_view path, std::string_view body);

  /// Blocks until stop(). Port 0 picks a free port; `on_ready` receives the
  /// bound port. Static files come from `static_dir` when it is set.
  void serve(const std::string& host, int port, const std::filesystem::path& static_dir = {},
             const std::function<void(int)>& on_ready = {});
  void stop();

  /// Snapshot of the current project (empty before POST /api/project).
  std::optional<Project> project() const;

 private:
  struct Server;

  Json route(std::string_view method, const std::vector<std::string>& parts, const Json& body, HttpReply& reply);
  Json load_project(const Json& body);
  Json srdf_collection(std::string_view method, const std::vector<std::string>& parts, const Json& body);
  Json commit_semantic(SemanticModel next);
  Json plan(const Json& body);
  Json random_state(const Json& body);
  void collect_acm();
  Project& require_project();
  const Project& require_project() const;

  const PluginRegistry* registry_;
  mutable std::shared_mutex mutex_;
  std::optional<Project> project_;
  std::unique_ptr<AcmJobTable> jobs_;
  std::string pending_job_;  // job whose result is not yet in the project
  std::atomic<bool> has_pending_{false};
  std::unique_ptr<Server> server_;
};

}  // namespace robosetup
