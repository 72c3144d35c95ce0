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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "robosetup/collision.hpp"
#include "robosetup/kinematics.hpp"
#include "robosetup/srdf.hpp"

namespace robosetup {

/// Immutable snapshot a plan call works against.
struct PlanningScene {
  std::shared_ptr<const RobotModel> model;
  std::shared_ptr<const SemanticModel> semantic;  // optional
  AllowedCollisionMatrix acm;
  PlanningSceneWorld world;

  const VirtualJoint* virtual_joint() const { return semantic ? semantic->sampled_virtual_joint() : nullptr; }
  /// Named group from the semantic model, or the whole robot for
  /// "whole_robot" / an empty name.
  JointGroup group(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Plugin interfaces
// ---------------------------------------------------------------------------

/// State validity with an instrumented narrow-phase counter.
class CollisionChecker {
 public:
  virtual ~CollisionChecker() = default;
  /// True when the state is collision-free.
  virtual bool is_valid(const RobotState& state) = 0;
  virtual std::size_t checks_performed() const = 0;
};

class IkSolver {
 public:
  virtual ~IkSolver() = default;
  virtual IkResult solve(const RobotModel& model, const JointGroup& group, const Pose& target, const RobotState& seed,
                         const IkParams& params) = 0;
};

using Path = std::vector<RobotState>;

/// Everything a planner sees. Motion checks go through `checker`.
struct PlannerContext {
  const PlanningScene* scene = nullptr;
  JointGroup group;
  std::vector<VariableBounds> bounds;
  RobotState start;
  RobotState goal;
  double goal_tolerance = 1e-3;
  double step = 0.0;  // collision resolution step in configuration distance
  /// Edges are checked at this finer spacing (half the step by default) so
  /// accepted paths still pass when re-validated at step / 2.
  double check_step = 0.0;
  double time_budget = 5.0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  CollisionChecker* checker = nullptr;

  MotionCheck check_motion(const RobotState& from, const RobotState& to) const;
  double param(const std::string& name, double fallback) const;
};

struct PlannerResult {
  bool success = false;
  Path path;
  std::size_t iterations = 0;
  std::string message;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlannerResult solve(const PlannerContext& context) = 0;
};

struct JointGoal {
  RobotState state;
  double tolerance = 1e-3;
};

struct PoseGoal {
  Pose pose;
  std::string link;  // empty: the group's tip link
};

struct JointKinematicLimits {
  double max_velocity = 1.0;
  double max_acceleration = 1.0;
};

struct PlanRequest {
  std::string group;
  RobotState start;
  std::variant<JointGoal, PoseGoal> goal;
  double time_budget = 5.0;
  std::string planner = "rrt";
  std::map<std::string, double> planner_params;
  double resolution_fraction = 0.01;
  std::uint64_t seed = 0;
  std::string collision_checker = "native";
  std::string ik_solver = "dls";
  IkParams ik;
  std::vector<std::string> adapters{"fix_start_bounds", "time_parameterization"};
  /// Per-joint limits for time parameterization; missing joints use the
  /// URDF velocity (or 1.0) and an acceleration of 1.0.
  std::map<std::string, JointKinematicLimits> limits;
};

struct TrajectoryPoint {
  double time = 0.0;
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> accelerations;
};

/// Time-parameterized path. Each path segment follows a synchronized
/// trapezoidal (or triangular) profile that starts and ends at rest.
class Trajectory {
 public:
  struct Segment {
    double t0 = 0.0;
    double duration = 0.0;
    std::vector<double> q0;
    std::vector<double> delta;
    double peak = 0.0;   // peak of ds/dt for the normalized s in [0, 1]
    double accel = 0.0;  // |d2s/dt2| during ramps
  };

  Trajectory() = default;
  Trajectory(std::vector<std::string> joints, std::vector<TrajectoryPoint> points, std::vector<Segment> segments);

  const std::vector<std::string>& joints() const { return joints_; }
  /// Knots: path waypoints plus the ramp/cruise switch times.
  const std::vector<TrajectoryPoint>& points() const { return points_; }
  const std::vector<Segment>& segments() const { return segments_; }
  double duration() const { return points_.empty() ? 0.0 : points_.back().time; }

  /// Exact profile value at time t (clamped into [0, duration]).
  /// Accelerations are right-continuous at phase switches.
  TrajectoryPoint evaluate(double t) const;
  /// Samples at `rate` Hz from 0 through the end time (inclusive).
  Trajectory resample(double rate) const;

 private:
  std::vector<std::string> joints_;
  std::vector<TrajectoryPoint> points_;
  std::vector<Segment> segments_;
};

struct PlanResponse {
  bool success = false;
  std::string message;
  RobotState start;  // after pre-adapters
  RobotState goal;   // resolved joint goal
  Path path;
  std::optional<Trajectory> trajectory;
  double planning_time = 0.0;
  std::size_t checks_performed = 0;
  std::size_t iterations = 0;
};

/// Pre/post processing around the planner.
class PlanningAdapter {
 public:
  virtual ~PlanningAdapter() = default;
  virtual void adjust_request(const PlanningScene&, const JointGroup&, PlanRequest&) {}
  virtual void process_response(const PlanningScene&, const JointGroup&, const PlanRequest&, PlanResponse&) {}
};

enum class PluginKind { kPlanner, kIkSolver, kCollisionChecker, kAdapter };

std::string_view to_string(PluginKind kind);

using PlannerFactory = std::function<std::unique_ptr<Planner>()>;
using IkSolverFactory = std::function<std::unique_ptr<IkSolver>()>;
using CollisionCheckerFactory = std::function<std::unique_ptr<CollisionChecker>(const PlanningScene&)>;
using AdapterFactory = std::function<std::unique_ptr<PlanningAdapter>()>;
using PluginFactory = std::variant<PlannerFactory, IkSolverFactory, CollisionCheckerFactory, AdapterFactory>;

/// Factories keyed by (kind, name). Registration takes an exclusive lock;
/// lookups share it.
class PluginRegistry {
 public:
  /// Registry preloaded with planner "rrt", ik_solver "dls", collision
  /// checker "native" and adapters "fix_start_bounds", "time_parameterization".
  static PluginRegistry with_defaults();
  /// Process-wide registry with the defaults.
  static PluginRegistry& global();

  PluginRegistry() = default;
  PluginRegistry(const PluginRegistry& other);

  /// Throws Error(kConflict) if (kind, name) exists, Error(kValidation) if
  /// the factory type does not match `kind`.
  void register_plugin(PluginKind kind, const std::string& name, PluginFactory factory);
  bool has(PluginKind kind, const std::string& name) const;
  std::vector<std::string> names(PluginKind kind) const;

  /// Throw Error(kNotFound) for unregistered names.
  std::unique_ptr<Planner> make_planner(const std::string& name) const;
  std::unique_ptr<IkSolver> make_ik_solver(const std::string& name) const;
  std::unique_ptr<CollisionChecker> make_collision_checker(const std::string& name, const PlanningScene& scene) const;
  std::unique_ptr<PlanningAdapter> make_adapter(const std::string& name) const;

 private:
  const PluginFactory& lookup(PluginKind kind, const std::string& name) const;

  mutable std::shared_mutex mutex_;
  std::map<std::pair<PluginKind, std::string>, PluginFactory> factories_;
};

/// Native checker: full-model self and world checks through CollisionContext.
std::unique_ptr<CollisionChecker> make_native_checker(const PlanningScene& scene, bool boolean_only = true);

/// Goal-biased RRT in the group's joint space.
std::unique_ptr<Planner> make_rrt_planner();

/// Plans with the request's planner and adapter chain. Invalid requests,
/// colliding start or goal states and IK failures throw Error; running out of
/// time returns success = false.
PlanResponse plan(const PlanningScene& scene, const PlanRequest& request,
                  const PluginRegistry& registry = PluginRegistry::global());

/// Clamps start values within `tolerance` beyond a limit onto the limit;
/// larger violations throw Error(kValidation).
void fix_start_bounds(const std::vector<VariableBounds>& bounds, RobotState& start, double tolerance = 1e-6);

/// Synchronized trapezoidal time parameterization. Consecutive duplicate
/// states are merged. Throws Error(kValidation) for nonpositive limits.
Trajectory time_parameterize(const std::vector<std::string>& joints, const Path& path,
                             const std::vector<JointKinematicLimits>& limits);

/// Limits for `joints`: request overrides, else URDF velocity (or 1.0) and
/// acceleration 1.0.
std::vector<JointKinematicLimits> resolve_limits(const RobotModel& model, const std::vector<std::string>& joints,
                                                 const std::map<std::string, JointKinematicLimits>& overrides);

/// "t,<joint>_pos,<joint>_vel,<joint>_acc,..." with one row per point.
std::string trajectory_to_csv(const Trajectory& trajectory);

/// Sum of weighted L2 distances between consecutive states.
double path_length(const std::vector<VariableBounds>& bounds, const Path& path);

}  // namespace robosetup
