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

#include "robosetup/planning.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

#include "robosetup/error.hpp"
#include "robosetup/text.hpp"

namespace robosetup {

namespace {
constexpr double kPi = 3.14159265358979323846;
using Clock = std::chrono::steady_clock;
}  // namespace

JointGroup PlanningScene::group(const std::string& name) const {
  if (semantic && semantic->find_group(name) != nullptr) return resolve_group(*model, *semantic, name);
  if (name.empty() || name == "whole_robot") {
    JointGroup g = whole_robot_group(*model, virtual_joint());
    if (semantic) {
      auto& j = g.joints;
      for (const auto& p : semantic->passive_joints) j.erase(std::remove(j.begin(), j.end(), p), j.end());
    }
    return g;
  }
  throw Error(ErrorCode::kNotFound, "unknown planning group '" + name + "'", name);
}

MotionCheck PlannerContext::check_motion(const RobotState& from, const RobotState& to) const {
  return validate_motion(bounds, from, to, check_step > 0.0 ? check_step : step,
                         [this](const RobotState& s) { return checker->is_valid(s); });
}

double PlannerContext::param(const std::string& name, double fallback) const {
  auto it = params.find(name);
  return it != params.end() ? it->second : fallback;
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

Trajectory::Trajectory(std::vector<std::string> joints, std::vector<TrajectoryPoint> points,
                       std::vector<Segment> segments)
    : joints_(std::move(joints)), points_(std::move(points)), segments_(std::move(segments)) {}

namespace {

// Normalized rest-to-rest profile: returns (s, ds, dds) at local time tau.
std::array<double, 3> profile(const Trajectory::Segment& seg, double tau) {
  const double a = seg.accel;
  const double v = seg.peak;
  const double ta = v / a;
  const double T = seg.duration;
  if (tau < ta) return {0.5 * a * tau * tau, a * tau, a};
  if (tau < T - ta) return {0.5 * a * ta * ta + v * (tau - ta), v, 0.0};
  if (tau < T) {
    const double r = T - tau;
    return {1.0 - 0.5 * a * r * r, a * r, -a};
  }
  return {1.0, 0.0, 0.0};
}

TrajectoryPoint point_at(const Trajectory::Segment& seg, double tau) {
  const auto [s, ds, dds] = profile(seg, tau);
  TrajectoryPoint p;
  p.time = seg.t0 + tau;
  for (std::size_t j = 0; j < seg.q0.size(); ++j) {
    p.positions.push_back(s >= 1.0 ? seg.q0[j] + seg.delta[j] : seg.q0[j] + s * seg.delta[j]);
    p.velocities.push_back(ds * seg.delta[j]);
    p.accelerations.push_back(dds * seg.delta[j]);
  }
  return p;
}

}  // namespace

TrajectoryPoint Trajectory::evaluate(double t) const {
  if (segments_.empty()) {
    TrajectoryPoint p = points_.empty() ? TrajectoryPoint{} : points_.front();
    p.time = std::max(0.0, t);
    return p;
  }
  t = std::clamp(t, 0.0, duration());
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double value, const Segment& s) { return value < s.t0; });
  const Segment& seg = *std::prev(it);
  TrajectoryPoint p = point_at(seg, t - seg.t0);
  p.time = t;
  return p;
}

Trajectory Trajectory::resample(double rate) const {
  if (!(rate > 0.0)) throw Error(ErrorCode::kValidation, "resample rate must be positive", "rate");
  std::vector<TrajectoryPoint> pts;
  const double T = duration();
  const auto n = static_cast<std::size_t>(std::floor(T * rate + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) pts.push_back(evaluate(static_cast<double>(i) / rate));
  if (pts.back().time < T) pts.push_back(evaluate(T));
  return Trajectory(joints_, std::move(pts), segments_);
}

std::vector<JointKinematicLimits> resolve_limits(const RobotModel& model, const std::vector<std::string>& joints,
                                                 const std::map<std::string, JointKinematicLimits>& overrides) {
  std::vector<JointKinematicLimits> out;
  for (const auto& name : joints) {
    if (auto it = overrides.find(name); it != overrides.end()) {
      out.push_back(it->second);
      continue;
    }
    JointKinematicLimits l;
    if (const auto idx = model.joint_index(name)) {
      const Joint& j = model.joints()[*idx];
      if (j.limits && j.limits->max_velocity > 0.0) l.max_velocity = j.limits->max_velocity;
    }
    out.push_back(l);
  }
  return out;
}

Trajectory time_parameterize(const std::vector<std::string>& joints, const Path& path,
                             const std::vector<JointKinematicLimits>& limits) {
  if (path.empty()) throw Error(ErrorCode::kValidation, "cannot time-parameterize an empty path");
  if (limits.size() != joints.size()) throw Error(ErrorCode::kValidation, "one limit pair per joint required");
  for (std::size_t j = 0; j < joints.size(); ++j) {
    if (!(limits[j].max_velocity > 0.0) || !(limits[j].max_acceleration > 0.0)) {
      throw Error(ErrorCode::kValidation, "velocity and acceleration limits must be positive", joints[j]);
    }
  }
  std::vector<std::vector<double>> q;
  for (const auto& state : path) {
    std::vector<double> row;
    for (const auto& name : joints) row.push_back(state.at(name));
    if (q.empty() || row != q.back()) q.push_back(std::move(row));
  }

  const std::size_t n = joints.size();
  std::vector<TrajectoryPoint> points;
  std::vector<Trajectory::Segment> segments;
  auto rest_point = [&](double t, const std::vector<double>& pos) {
    return TrajectoryPoint{t, pos, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  };
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < q.size(); ++k) {
    Trajectory::Segment seg;
    seg.t0 = t;
    seg.q0 = q[k];
    double peak = std::numeric_limits<double>::infinity();
    double accel = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double d = q[k + 1][j] - q[k][j];
      seg.delta.push_back(d);
      if (d != 0.0) {
        peak = std::min(peak, limits[j].max_velocity / std::abs(d));
        accel = std::min(accel, limits[j].max_acceleration / std::abs(d));
      }
    }
    if (peak * peak / accel >= 1.0) {
      // Triangular: the ramp alone covers the segment.
      peak = std::sqrt(accel);
      seg.duration = 2.0 / peak;
    } else {
      seg.duration = 1.0 / peak + peak / accel;
    }
    seg.peak = peak;
    seg.accel = accel;
    const double ta = peak / accel;
    points.push_back(point_at(seg, 0.0));
    points.push_back(point_at(seg, ta));
    if (seg.duration - 2.0 * ta > 1e-12 * seg.duration) points.push_back(point_at(seg, seg.duration - ta));
    t += seg.duration;
    segments.push_back(std::move(seg));
  }
  points.push_back(rest_point(t, q.back()));
  return Trajectory(joints, std::move(points), std::move(segments));
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
  std::string out = "t";
  for (const auto& j : trajectory.joints()) out += "," + j + "_pos," + j + "_vel," + j + "_acc";
  out += '\n';
  for (const auto& p : trajectory.points()) {
    out += format_double(p.time);
    for (std::size_t j = 0; j < trajectory.joints().size(); ++j) {
      out += ',' + format_double(p.positions[j]) + ',' + format_double(p.velocities[j]) + ',' +
             format_double(p.accelerations[j]);
    }
    out += '\n';
  }
  return out;
}

double path_length(const std::vector<VariableBounds>& bounds, const Path& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += state_distance(bounds, path[i - 1], path[i]);
  return total;
}

// ---------------------------------------------------------------------------
// Built-in plugins
// ---------------------------------------------------------------------------

namespace {

class NativeChecker : public CollisionChecker {
 public:
  NativeChecker(const PlanningScene& scene, bool boolean_only)
      : ctx_(*scene.model, scene.acm, scene.world, scene.virtual_joint()) {
    flags_.boolean_only = boolean_only;
  }

  bool is_valid(const RobotState& state) override {
    const auto r = ctx_.check(state, flags_);
    checks_ += r.checks_performed;
    return !r.in_collision;
  }
  std::size_t checks_performed() const override { return checks_; }

 private:
  CollisionContext ctx_;
  CollisionFlags flags_;
  std::size_t checks_ = 0;
};

class DlsSolver : public IkSolver {
 public:
  IkResult solve(const RobotModel& model, const JointGroup& group, const Pose& target, const RobotState& seed,
                 const IkParams& params) override {
    return solve_ik(model, group, target, seed, params);
  }
};

class Rrt : public Planner {
 public:
  PlannerResult solve(const PlannerContext& ctx) override {
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(ctx.time_budget));
    const double goal_bias = ctx.param("goal_bias", 0.05);
    const double step = ctx.param("step_scale", 1.0) * ctx.step;
    const auto max_iterations = static_cast<std::size_t>(ctx.param("max_iterations", 1e9));
    const std::size_t dim = ctx.bounds.size();

    PlannerResult result;
    auto vec = [&](const RobotState& s) {
      std::vector<double> v(dim);
      for (std::size_t i = 0; i < dim; ++i) v[i] = s.at(ctx.bounds[i].name);
      return v;
    };
    auto to_state = [&](const std::vector<double>& v) {
      RobotState s = ctx.start;
      for (std::size_t i = 0; i < dim; ++i) s.values[ctx.bounds[i].name] = v[i];
      return s;
    };
    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < dim; ++i) sum += ctx.bounds[i].weight * (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(sum);
    };

    const auto goal = vec(ctx.goal);
    std::vector<std::vector<double>> nodes{vec(ctx.start)};
    std::vector<std::size_t> parent{0};
    auto finish = [&](std::size_t last) {
      std::vector<std::size_t> chain;
      for (std::size_t i = last;; i = parent[i]) {
        chain.push_back(i);
        if (i == 0) break;
      }
      result.path.push_back(ctx.start);
      for (auto it = std::next(chain.rbegin()); it != chain.rend(); ++it) result.path.push_back(to_state(nodes[*it]));
      result.path.push_back(ctx.goal);
      result.success = true;
    };

    if (dist(nodes[0], goal) <= step && ctx.check_motion(ctx.start, ctx.goal).valid) {
      finish(0);
      return result;
    }
    Rng rng(ctx.seed);
    std::vector<double> sample(dim);
    while (result.iterations < max_iterations) {
      if (Clock::now() >= deadline) {
        result.message = "time budget exhausted";
        return result;
      }
      ++result.iterations;
      if (rng.uniform01() < goal_bias) {
        sample = goal;
      } else {
        for (std::size_t i = 0; i < dim; ++i) {
          const auto& b = ctx.bounds[i];
          sample[i] = b.continuous ? kPi - 2.0 * kPi * rng.uniform01() : rng.uniform(b.lower, b.upper);
        }
      }
      std::size_t near = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = dist(nodes[i], sample);
        if (d < best) {
          best = d;
          near = i;
        }
      }
      if (best <= 0.0) continue;
      std::vector<double> next = sample;
      if (best > step) {
        const double f = step / best;
        for (std::size_t i = 0; i < dim; ++i) next[i] = nodes[near][i] + f * (sample[i] - nodes[near][i]);
      }
      if (!ctx.check_motion(to_state(nodes[near]), to_state(next)).valid) continue;
      nodes.push_back(next);
      parent.push_back(near);
      const std::size_t added = nodes.size() - 1;
      if (dist(next, goal) <= step && ctx.check_motion(to_state(next), ctx.goal).valid) {
        finish(added);
        return result;
      }
    }
    result.message = "iteration limit reached";
    return result;
  }
};

class FixStartBounds : public PlanningAdapter {
 public:
  void adjust_request(const PlanningScene& scene, const JointGroup& group, PlanRequest& request) override {
    fix_start_bounds(group_bounds(*scene.model, group, scene.virtual_joint()), request.start);
  }
};

class TimeParameterization : public PlanningAdapter {
 public:
  void process_response(const PlanningScene& scene, const JointGroup& group, const PlanRequest& request,
                        PlanResponse& response) override {
    if (!response.success || response.path.empty()) return;
    std::vector<std::string> joints;
    for (const auto& b : group_bounds(*scene.model, group, scene.virtual_joint())) joints.push_back(b.name);
    response.trajectory = time_parameterize(joints, response.path, resolve_limits(*scene.model, joints, request.limits));
  }
};

}  // namespace

std::unique_ptr<CollisionChecker> make_native_checker(const PlanningScene& scene, bool boolean_only) {
  return std::make_unique<NativeChecker>(scene, boolean_only);
}

std::unique_ptr<Planner> make_rrt_planner() { return std::make_unique<Rrt>(); }

void fix_start_bounds(const std::vector<VariableBounds>& bounds, RobotState& start, double tolerance) {
  for (const auto& b : bounds) {
    auto it = start.values.find(b.name);
    if (it == start.values.end()) continue;
    double& v = it->second;
    if (b.continuous) {
      if (!(v > -kPi && v <= kPi)) v = normalize_angle(v);
      continue;
    }
    if (v < b.lower) {
      if (b.lower - v > tolerance) {
        throw Error(ErrorCode::kValidation, "start value of '" + b.name + "' is below its lower limit", b.name);
      }
      v = b.lower;
    } else if (v > b.upper) {
      if (v - b.upper > tolerance) {
        throw Error(ErrorCode::kValidation, "start value of '" + b.name + "' is above its upper limit", b.name);
      }
      v = b.upper;
    }
  }
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

std::string_view to_string(PluginKind kind) {
  switch (kind) {
    case PluginKind::kPlanner: return "planner";
    case PluginKind::kIkSolver: return "ik_solver";
    case PluginKind::kCollisionChecker: return "collision_checker";
    case PluginKind::kAdapter: return "adapter";
  }
  return "planner";
}

PluginRegistry::PluginRegistry(const PluginRegistry& other) {
  std::shared_lock lock(other.mutex_);
  factories_ = other.factories_;
}

PluginRegistry PluginRegistry::with_defaults() {
  PluginRegistry r;
  r.register_plugin(PluginKind::kPlanner, "rrt", PlannerFactory([] { return make_rrt_planner(); }));
  r.register_plugin(PluginKind::kIkSolver, "dls",
                    IkSolverFactory([]() -> std::unique_ptr<IkSolver> { return std::make_unique<DlsSolver>(); }));
  r.register_plugin(PluginKind::kCollisionChecker, "native",
                    CollisionCheckerFactory([](const PlanningScene& s) { return make_native_checker(s); }));
  r.register_plugin(PluginKind::kAdapter, "fix_start_bounds", AdapterFactory([]() -> std::unique_ptr<PlanningAdapter> {
                      return std::make_unique<FixStartBounds>();
                    }));
  r.register_plugin(PluginKind::kAdapter, "time_parameterization",
                    AdapterFactory([]() -> std::unique_ptr<PlanningAdapter> {
                      return std::make_unique<TimeParameterization>();
                    }));
  return r;
}

PluginRegistry& PluginRegistry::global() {
  static PluginRegistry registry = with_defaults();
  return registry;
}

void PluginRegistry::register_plugin(PluginKind kind, const std::string& name, PluginFactory factory) {
  if (factory.index() != static_cast<std::size_t>(kind)) {
    throw Error(ErrorCode::kValidation, "factory type does not match plugin kind '" + std::string(to_string(kind)) + "'",
                name);
  }
  std::unique_lock lock(mutex_);
  auto [it, inserted] = factories_.try_emplace({kind, name}, std::move(factory));
  if (!inserted) {
    throw Error(ErrorCode::kConflict, std::string(to_string(kind)) + " '" + name + "' is already registered", name);
  }
}

bool PluginRegistry::has(PluginKind kind, const std::string& name) const {
  std::shared_lock lock(mutex_);
  return factories_.count({kind, name}) != 0;
}

std::vector<std::string> PluginRegistry::names(PluginKind kind) const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [key, f] : factories_) {
    if (key.first == kind) out.push_back(key.second);
  }
  return out;
}

const PluginFactory& PluginRegistry::lookup(PluginKind kind, const std::string& name) const {
  std::shared_lock lock(mutex_);
  auto it = factories_.find({kind, name});
  if (it == factories_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown " + std::string(to_string(kind)) + " plugin '" + name + "'", name);
  }
  return it->second;
}

std::unique_ptr<Planner> PluginRegistry::make_planner(const std::string& name) const {
  return std::get<PlannerFactory>(lookup(PluginKind::kPlanner, name))();
}

std::unique_ptr<IkSolver> PluginRegistry::make_ik_solver(const std::string& name) const {
  return std::get<IkSolverFactory>(lookup(PluginKind::kIkSolver, name))();
}

std::unique_ptr<CollisionChecker> PluginRegistry::make_collision_checker(const std::string& name,
                                                                         const PlanningScene& scene) const {
  return std::get<CollisionCheckerFactory>(lookup(PluginKind::kCollisionChecker, name))(scene);
}

std::unique_ptr<PlanningAdapter> PluginRegistry::make_adapter(const std::string& name) const {
  return std::get<AdapterFactory>(lookup(PluginKind::kAdapter, name))();
}

// ---------------------------------------------------------------------------
// plan()
// ---------------------------------------------------------------------------

namespace {

void check_within(const std::vector<VariableBounds>& bounds, const RobotState& state, const char* what) {
  for (const auto& b : bounds) {
    const double v = state.at(b.name);
    const bool ok = b.continuous ? (v > -kPi - 1e-9 && v <= kPi + 1e-9) : (v >= b.lower - 1e-9 && v <= b.upper + 1e-9);
    if (!ok || !std::isfinite(v)) {
      throw Error(ErrorCode::kValidation, std::string(what) + " value of '" + b.name + "' is outside its limits", b.name);
    }
  }
}

}  // namespace

PlanResponse plan(const PlanningScene& scene, const PlanRequest& request_in, const PluginRegistry& registry) {
  if (!scene.model) throw Error(ErrorCode::kNotFound, "no robot model loaded");
  if (!(request_in.time_budget > 0.0)) throw Error(ErrorCode::kValidation, "time budget must be positive", "time_budget");
  if (!(request_in.resolution_fraction > 0.0 && request_in.resolution_fraction < 1.0)) {
    throw Error(ErrorCode::kValidation, "resolution_fraction must lie in (0, 1)", "resolution_fraction");
  }
  const auto started = Clock::now();
  const RobotModel& model = *scene.model;
  const VirtualJoint* vj = scene.virtual_joint();
  const JointGroup group = scene.group(request_in.group);
  const auto bounds = group_bounds(model, group, vj);

  PlanRequest request = request_in;
  {
    RobotState filled = default_state(model, vj);
    for (const auto& [k, v] : request.start.values) filled.values[k] = v;
    request.start = std::move(filled);
  }
  std::vector<std::unique_ptr<PlanningAdapter>> adapters;
  for (const auto& name : request.adapters) adapters.push_back(registry.make_adapter(name));
  for (auto& a : adapters) a->adjust_request(scene, group, request);
  check_within(bounds, request.start, "start");

  PlanResponse response;
  response.start = request.start;
  double tolerance = 0.0;
  if (const auto* jg = std::get_if<JointGoal>(&request.goal)) {
    response.goal = request.start;
    for (const auto& b : bounds) {
      auto it = jg->state.values.find(b.name);
      if (it == jg->state.values.end()) {
        throw Error(ErrorCode::kValidation, "goal has no value for '" + b.name + "'", b.name);
      }
      response.goal.values[b.name] = it->second;
    }
    check_within(bounds, response.goal, "goal");
    tolerance = jg->tolerance;
  } else {
    const auto& pg = std::get<PoseGoal>(request.goal);
    JointGroup ik_group = group;
    if (!pg.link.empty()) ik_group.tip_link = pg.link;
    auto solver = registry.make_ik_solver(request.ik_solver);
    const IkResult ik = solver->solve(model, ik_group, pg.pose, request.start, request.ik);
    if (!ik.success) {
      throw Error(ErrorCode::kPlanFailed, "no IK solution for the pose goal of group '" + group.name + "'", group.name);
    }
    response.goal = request.start;
    for (const auto& b : bounds) response.goal.values[b.name] = ik.state.at(b.name);
    tolerance = 1e-3;
  }

  auto checker = registry.make_collision_checker(request.collision_checker, scene);
  if (!checker->is_valid(request.start)) throw Error(ErrorCode::kValidation, "start state is in collision", "start");
  if (!checker->is_valid(response.goal)) throw Error(ErrorCode::kValidation, "goal state is in collision", "goal");

  if (state_distance(bounds, request.start, response.goal) <= tolerance) {
    response.success = true;
    response.path = {request.start};
  } else {
    PlannerContext ctx;
    ctx.scene = &scene;
    ctx.group = group;
    ctx.bounds = bounds;
    ctx.start = request.start;
    ctx.goal = response.goal;
    ctx.goal_tolerance = tolerance;
    ctx.step = request.resolution_fraction * space_extent(bounds);
    ctx.check_step = 0.5 * ctx.step;
    // The planner gets whatever is left of the budget after setup.
    ctx.time_budget = std::max(0.0, request.time_budget - std::chrono::duration<double>(Clock::now() - started).count());
    ctx.seed = request.seed;
    ctx.params = request.planner_params;
    ctx.checker = checker.get();
    auto planner = registry.make_planner(request.planner);
    PlannerResult pr = planner->solve(ctx);
    response.success = pr.success;
    response.path = std::move(pr.path);
    response.iterations = pr.iterations;
    response.message = pr.message;
  }
  for (auto& a : adapters) a->process_response(scene, group, request, response);
  response.checks_performed = checker->checks_performed();
  response.planning_time = std::chrono::duration<double>(Clock::now() - started).count();
  return response;
}

}  // namespace robosetup
