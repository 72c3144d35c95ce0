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

#include "robosetup/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <mutex>

#include "robosetup/error.hpp"
#include "robosetup/facade.hpp"

namespace robosetup {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> string_list(const Json& json, const char* key) {
  std::vector<std::string> out;
  if (!json.contains(key)) return out;
  const Json& arr = json.at(key);
  if (!arr.is_array()) throw Error(ErrorCode::kParse, std::string(key) + " must be an array", key);
  for (const auto& v : arr) out.push_back(v.get<std::string>());
  return out;
}

std::string required_string(const Json& json, const char* key) {
  if (!json.is_object() || !json.contains(key) || !json.at(key).is_string()) {
    throw Error(ErrorCode::kParse, std::string("missing string field '") + key + "'", key);
  }
  return json.at(key).get<std::string>();
}

VirtualJointKind virtual_joint_kind(const std::string& type) {
  if (type == "fixed") return VirtualJointKind::kFixed;
  if (type == "planar") return VirtualJointKind::kPlanar;
  if (type == "floating") return VirtualJointKind::kFloating;
  throw Error(ErrorCode::kParse, "unknown virtual joint type '" + type + "'", "type");
}

Json mesh_to_json(const TriangleMesh& mesh) {
  Json verts = Json::array();
  for (const auto& v : mesh.vertices) verts.push_back(Json::array({v.x(), v.y(), v.z()}));
  Json tris = Json::array();
  for (const auto& t : mesh.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
  return Json{{"vertices", verts}, {"triangles", tris}};
}

Json geometry_list(const std::vector<Geometry>& items) {
  Json out = Json::array();
  for (const auto& g : items) {
    out.push_back(Json{{"shape", shape_to_json(g.shape)},
                       {"origin", pose_to_json(g.origin)},
                       {"mesh", mesh_to_json(triangulate(g.shape))}});
  }
  return out;
}

Json model_summary(const RobotModel& model) {
  Json joints = Json::array();
  for (const auto& j : model.joints()) {
    Json e{{"name", j.name},
           {"type", to_string(j.kind)},
           {"parent", j.parent_link},
           {"child", j.child_link},
           {"axis", Json::array({j.axis.x(), j.axis.y(), j.axis.z()})}};
    if (j.limits) {
      e["lower"] = j.limits->lower;
      e["upper"] = j.limits->upper;
      e["max_velocity"] = j.limits->max_velocity;
    }
    joints.push_back(std::move(e));
  }
  Json links = Json::array();
  for (const auto& l : model.links()) links.push_back(l.name);
  return Json{{"name", model.name()},
              {"root_link", model.root_link()},
              {"links", links},
              {"joints", joints},
              {"active_joints", model.active_joints()},
              {"warnings", model.warnings()},
              {"validation", report_to_json(validate_model(model))}};
}

/// Rejected semantic edit; carries the report of the would-be state.
class Rejected : public Error {
 public:
  Rejected(const Finding& first, Json report)
      : Error(ErrorCode::kValidation, "edit rejected: " + first.message, first.element), report_(std::move(report)) {}
  const Json& report() const { return report_; }

 private:
  Json report_;
};

// Keep the merged state within known variables; bounded joints must stay in limits.
RobotState merge_state(const RobotModel& model, const VirtualJoint* vj, RobotState base, const Json& patch) {
  if (patch.is_null()) return base;
  const RobotState update = state_from_json(patch);
  for (const auto& [k, v] : update.values) {
    if (base.values.count(k) == 0) throw Error(ErrorCode::kValidation, "unknown state variable '" + k + "'", k);
    base.values[k] = v;
  }
  for (const auto& b : group_bounds(model, whole_robot_group(model, vj), vj)) {
    const double v = base.at(b.name);
    if (!b.continuous && (v < b.lower - 1e-9 || v > b.upper + 1e-9)) {
      throw Error(ErrorCode::kValidation, "value for '" + b.name + "' is outside its limits", b.name);
    }
  }
  return base;
}

}  // namespace

Json group_to_json(const PlanningGroup& group) {
  Json chains = Json::array();
  for (const auto& c : group.chains) chains.push_back(Json{{"base_link", c.base_link}, {"tip_link", c.tip_link}});
  return Json{{"name", group.name},
              {"joints", group.joints},
              {"links", group.links},
              {"chains", chains},
              {"subgroups", group.subgroups}};
}

PlanningGroup group_from_json(const Json& json) {
  PlanningGroup g;
  g.name = required_string(json, "name");
  g.joints = string_list(json, "joints");
  g.links = string_list(json, "links");
  g.subgroups = string_list(json, "subgroups");
  if (json.contains("chains")) {
    for (const auto& c : json.at("chains")) g.chains.push_back({required_string(c, "base_link"), required_string(c, "tip_link")});
  }
  return g;
}

Json group_state_to_json(const GroupState& state) {
  Json values = Json::object();
  for (const auto& [k, v] : state.values) values[k] = v;
  return Json{{"name", state.name}, {"group", state.group}, {"values", values}};
}

GroupState group_state_from_json(const Json& json) {
  GroupState s;
  s.name = required_string(json, "name");
  s.group = required_string(json, "group");
  if (json.contains("values")) s.values = state_from_json(json.at("values")).values;
  return s;
}

Json end_effector_to_json(const EndEffector& eef) {
  Json out{{"name", eef.name}, {"group", eef.group}, {"parent_link", eef.parent_link}};
  if (!eef.parent_group.empty()) out["parent_group"] = eef.parent_group;
  return out;
}

EndEffector end_effector_from_json(const Json& json) {
  EndEffector e;
  e.name = required_string(json, "name");
  e.group = required_string(json, "group");
  e.parent_link = required_string(json, "parent_link");
  if (json.contains("parent_group")) e.parent_group = json.at("parent_group").get<std::string>();
  return e;
}

Json virtual_joint_to_json(const VirtualJoint& vj) {
  Json bounds = Json::array();
  for (const auto& [lo, hi] : vj.bounds) bounds.push_back(Json::array({lo, hi}));
  return Json{{"name", vj.name},
              {"type", to_string(vj.kind)},
              {"parent_frame", vj.parent_frame},
              {"child_link", vj.child_link},
              {"bounds", bounds}};
}

VirtualJoint virtual_joint_from_json(const Json& json) {
  VirtualJoint v;
  v.name = required_string(json, "name");
  v.kind = virtual_joint_kind(json.value("type", std::string("fixed")));
  v.parent_frame = json.value("parent_frame", std::string("world"));
  v.child_link = required_string(json, "child_link");
  if (json.contains("bounds")) {
    for (const auto& b : json.at("bounds")) {
      if (!b.is_array() || b.size() != 2) throw Error(ErrorCode::kParse, "bounds entries must be [lower, upper]", "bounds");
      v.bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
    }
  }
  return v;
}

Json report_to_json(const ValidationReport& report) {
  Json findings = Json::array();
  for (const auto& f : report.findings) {
    findings.push_back(Json{{"severity", to_string(f.severity)}, {"element", f.element}, {"message", f.message}});
  }
  return Json{{"errors", report.count(Severity::kError)},
              {"warnings", report.count(Severity::kWarning)},
              {"findings", findings}};
}

Json trajectory_to_json(const Trajectory& trajectory) {
  Json points = Json::array();
  for (const auto& p : trajectory.points()) {
    points.push_back(Json{{"t", p.time},
                          {"positions", p.positions},
                          {"velocities", p.velocities},
                          {"accelerations", p.accelerations}});
  }
  return Json{{"joints", trajectory.joints()}, {"duration", trajectory.duration()}, {"points", points}};
}

Json error_to_json(const Error& error) {
  Json out{{"code", to_string(error.code())}, {"message", error.what()}};
  if (!error.element().empty()) out["element"] = error.element();
  return out;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kValidation: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kPlanFailed: return 422;
    case ErrorCode::kIo:
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

// ---------------------------------------------------------------------------
// Service
// ---------------------------------------------------------------------------

struct Service::Server {
  httplib::Server http;
};

Service::Service(const PluginRegistry* registry)
    : registry_(registry != nullptr ? registry : &PluginRegistry::global()), jobs_(std::make_unique<AcmJobTable>()) {}

Service::~Service() {
  stop();
  jobs_->cancel_all();
}

std::optional<Project> Service::project() const {
  std::shared_lock lock(mutex_);
  return project_;
}

Project& Service::require_project() {
  if (!project_) throw Error(ErrorCode::kNotFound, "no project loaded; POST /api/project first", "project");
  return *project_;
}

const Project& Service::require_project() const {
  if (!project_) throw Error(ErrorCode::kNotFound, "no project loaded; POST /api/project first", "project");
  return *project_;
}

void Service::collect_acm() {
  if (pending_job_.empty()) return;
  const auto job = jobs_->get(pending_job_);
  const AcmProgress progress = job->progress();
  if (!progress.finished) return;
  if (auto report = job->result(); report && project_) {
    project_->semantic.disabled = report->acm;
    project_->options.acm_seed = report->params.rng_seed;
    project_->acm = std::move(*report);
  }
  pending_job_.clear();
  has_pending_ = false;
}

HttpReply Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  HttpReply reply;
  try {
    std::vector<std::string> parts;
    for (std::size_t pos = 0; pos < path.size();) {
      const auto next = path.find('/', pos);
      const auto end = next == std::string_view::npos ? path.size() : next;
      if (end > pos) parts.emplace_back(path.substr(pos, end - pos));
      pos = end + 1;
    }
    if (parts.empty() || parts[0] != "api") throw Error(ErrorCode::kNotFound, "no such endpoint", std::string(path));
    Json in;
    if (!body.empty()) {
      try {
        in = Json::parse(body);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("request body is not JSON: ") + e.what());
      }
    }
    if (has_pending_) {
      std::unique_lock lock(mutex_);
      collect_acm();
    }
    Json out;
    // fk, plan and random_state only read the project
    const bool read_only = method == "GET" ||
                           (method == "POST" && parts.size() == 2 &&
                            (parts[1] == "fk" || parts[1] == "plan" || parts[1] == "random_state"));
    if (read_only) {
      std::shared_lock lock(mutex_);
      out = route(method, parts, in, reply);
    } else {
      std::unique_lock lock(mutex_);
      out = route(method, parts, in, reply);
    }
    if (reply.content_type == "application/json") reply.body = out.dump(2) + "\n";
  } catch (const Rejected& e) {
    reply.status = 400;
    reply.content_type = "application/json";
    Json out = error_to_json(e);
    out["validation"] = e.report();
    reply.body = out.dump(2) + "\n";
  } catch (const Error& e) {
    reply.status = http_status(e.code());
    reply.content_type = "application/json";
    reply.body = error_to_json(e).dump(2) + "\n";
  } catch (const Json::exception& e) {
    reply.status = 400;
    reply.content_type = "application/json";
    reply.body = error_to_json(Error(ErrorCode::kParse, std::string("bad request field: ") + e.what())).dump(2) + "\n";
  } catch (const std::exception& e) {
    reply.status = 500;
    reply.content_type = "application/json";
    reply.body = error_to_json(Error(ErrorCode::kInternal, e.what())).dump(2) + "\n";
  }
  return reply;
}

Json Service::route(std::string_view method, const std::vector<std::string>& parts, const Json& body,
                    HttpReply& reply) {
  const std::size_t n = parts.size();
  auto is = [&](std::string_view m, std::initializer_list<std::string_view> p) {
    if (method != m || n != p.size() + 1) return false;
    std::size_t i = 1;
    for (auto s : p) {
      if (s != "*" && parts[i] != s) return false;
      ++i;
    }
    return true;
  };

  if (is("GET", {"health"})) return Json{{"status", "ok"}, {"project", project_.has_value()}};
  if (is("POST", {"project"})) return load_project(body);
  if (is("GET", {"project"})) {
    const Project& p = require_project();
    Json out = model_summary(*p.model);
    out["semantic_validation"] = report_to_json(validate_semantic(*p.model, p.semantic));
    return out;
  }

  if (is("GET", {"model", "geometry"})) {
    const Project& p = require_project();
    const auto poses = link_poses(*p.model, default_state(*p.model));
    Json links = Json::array();
    for (std::size_t i = 0; i < p.model->links().size(); ++i) {
      const Link& l = p.model->links()[i];
      links.push_back(Json{{"name", l.name},
                           {"pose", pose_to_json(poses[i])},
                           {"visual", geometry_list(l.visual)},
                           {"collision", geometry_list(l.collision)}});
    }
    return Json{{"links", links}};
  }

  if (is("POST", {"fk"})) {
    const Project& p = require_project();
    const RobotState state = merge_state(*p.model, nullptr, default_state(*p.model),
                                         body.is_object() && body.contains("positions") ? body.at("positions") : Json());
    Json links = Json::object();
    for (const auto& [name, pose] : forward_kinematics(*p.model, state)) links[name] = pose_to_json(pose);
    return Json{{"links", links}};
  }

  if (is("POST", {"acm", "jobs"})) {
    const Project& p = require_project();
    AcmGenParams params;
    if (body.is_object()) {
      params.sample_count = body.value("samples", params.sample_count);
      params.rng_seed = body.value("seed", params.rng_seed);
      params.always_threshold = body.value("always_threshold", params.always_threshold);
      params.threads = body.value("threads", params.threads);
    }
    params.check();
    const std::string id = jobs_->start(p.model, params);
    pending_job_ = id;
    has_pending_ = true;
    reply.status = 202;
    return Json{{"id", id}};
  }
  if (is("GET", {"acm", "jobs", "*"}) || is("DELETE", {"acm", "jobs", "*"})) {
    const Project& p = require_project();
    const auto job = jobs_->get(parts[3]);
    if (method == "DELETE") job->cancel();
    const AcmProgress progress = job->progress();
    Json out{{"id", parts[3]},
             {"done", progress.done},
             {"total", progress.total},
             {"finished", progress.finished},
             {"cancelled", progress.cancelled}};
    if (progress.error) out["error"] = *progress.error;
    const auto pairs = collidable_pairs(*p.model);
    Json partial = Json::array();
    for (std::size_t i = 0; i < progress.partial_collisions.size() && i < pairs.size(); ++i) {
      partial.push_back(Json{{"link1", pairs[i].first}, {"link2", pairs[i].second},
                             {"collisions", progress.partial_collisions[i]}});
    }
    out["partial"] = partial;
    return out;
  }
  if (is("GET", {"acm"})) {
    const Project& p = require_project();
    if (!p.acm) throw Error(ErrorCode::kNotFound, "no completed ACM report yet", "acm");
    return acm_report_to_json(*p.acm);
  }

  if (n >= 2 && parts[1] == "srdf") {
    if (is("GET", {"srdf"})) {
      reply.content_type = "application/xml";
      reply.body = serialize_srdf(require_project().semantic);
      return {};
    }
    if (is("GET", {"srdf", "validation"})) {
      const Project& p = require_project();
      return report_to_json(validate_semantic(*p.model, p.semantic));
    }
    return srdf_collection(method, parts, body);
  }

  if (is("POST", {"bundle"})) {
    const Project& p = require_project();
    GenOptions options = p.options;
    const std::string dir = required_string(body, "directory");
    if (body.contains("model_path")) options.model_path = body.at("model_path").get<std::string>();
    if (body.contains("velocity_scaling")) options.velocity_scaling = body.at("velocity_scaling").get<double>();
    if (body.contains("planner_seed")) options.planner_seed = body.at("planner_seed").get<std::uint64_t>();
    const ConfigBundle bundle = generate_bundle(*p.model, p.semantic, options);
    const auto written = write_bundle(bundle, dir, body.value("overwrite", false));
    Json out = bundle.manifest_json();
    Json paths = Json::array();
    for (const auto& w : written) paths.push_back(w.string());
    out["written"] = paths;
    return out;
  }

  if (is("POST", {"plan"})) return plan(body);
  if (is("POST", {"random_state"})) return random_state(body);

  if (is("GET", {"world"})) return world_to_json(require_project().world);
  if (is("POST", {"world"})) {
    Project& p = require_project();
    p.world = world_from_json(body);
    return world_to_json(p.world);
  }
  if (is("GET", {"export", "state"})) return state_to_json(require_project().state);
  if (is("POST", {"import", "state"})) {
    Project& p = require_project();
    p.state = merge_state(*p.model, p.semantic.sampled_virtual_joint(), p.state, body);
    return state_to_json(p.state);
  }

  std::string path;
  for (const auto& s : parts) path += "/" + s;
  throw Error(ErrorCode::kNotFound, "no endpoint " + std::string(method) + " " + path, path);
}

Json Service::load_project(const Json& body) {
  if (!body.is_object()) throw Error(ErrorCode::kParse, "project request must be a JSON object");
  const fs::path asset_root = body.value("asset_root", std::string());
  Project p;
  if (body.contains("urdf")) {
    p.model = std::make_shared<RobotModel>(parse_urdf(required_string(body, "urdf"), asset_root));
  } else if (body.contains("path")) {
    const fs::path file = fs::absolute(required_string(body, "path"));
    p.model = std::make_shared<RobotModel>(
        load_urdf_file(file, asset_root.empty() ? std::nullopt : std::optional<fs::path>(asset_root)));
    p.model_path = file;
    p.options.model_path = file.string();
  } else {
    throw Error(ErrorCode::kParse, "project request needs 'urdf' text or a 'path'", "urdf");
  }
  if (body.contains("srdf")) {
    p.semantic = parse_srdf(required_string(body, "srdf"), *p.model);
  } else {
    p.semantic.robot_name = p.model->name();
  }
  p.state = default_state(*p.model, p.semantic.sampled_virtual_joint());

  // a running job belongs to the old model
  jobs_->cancel_all();
  jobs_ = std::make_unique<AcmJobTable>();
  pending_job_.clear();
  has_pending_ = false;
  project_ = std::move(p);
  Json out = model_summary(*project_->model);
  out["semantic_validation"] = report_to_json(validate_semantic(*project_->model, project_->semantic));
  return out;
}

Json Service::commit_semantic(SemanticModel next) {
  Project& p = require_project();
  const ValidationReport before = validate_semantic(*p.model, p.semantic);
  const ValidationReport after = validate_semantic(*p.model, next);
  for (const auto& f : after.findings) {
    if (f.severity != Severity::kError) continue;
    if (std::find(before.findings.begin(), before.findings.end(), f) == before.findings.end()) {
      throw Rejected(f, report_to_json(after));
    }
  }
  p.semantic = std::move(next);
  return Json{{"validation", report_to_json(after)}};
}

Json Service::srdf_collection(std::string_view method, const std::vector<std::string>& parts, const Json& body) {
  Project& p = require_project();
  const std::string& kind = parts.size() > 2 ? parts[2] : std::string();
  const std::size_t n = parts.size();
  SemanticModel next = p.semantic;

  // Generic list operations over one of the semantic vectors.
  auto crud = [&](auto member, auto key_of, auto to_json, auto from_json, std::size_t key_parts) -> Json {
    const auto& items = p.semantic.*member;
    auto& target = next.*member;
    using Item = typename std::decay_t<decltype(items)>::value_type;
    std::vector<std::string> key(parts.begin() + 3, parts.end());
    auto find = [&](auto& vec, const std::vector<std::string>& k) {
      return std::find_if(vec.begin(), vec.end(), [&](const Item& it) { return key_of(it) == k; });
    };
    if (method == "GET" && key.empty()) {
      Json out = Json::array();
      for (const auto& it : items) out.push_back(to_json(it));
      return out;
    }
    if (method == "POST" && key.empty()) {
      Item item = from_json(body);
      if (find(target, key_of(item)) != target.end()) {
        throw Error(ErrorCode::kConflict, kind + " entry already exists", key_of(item).back());
      }
      target.push_back(std::move(item));
      return commit_semantic(std::move(next));
    }
    if (key.size() != key_parts) throw Error(ErrorCode::kNotFound, "bad " + kind + " path", kind);
    auto it = find(target, key);
    if (it == target.end()) throw Error(ErrorCode::kNotFound, "no " + kind + " entry '" + key.back() + "'", key.back());
    if (method == "GET") return to_json(*it);
    if (method == "DELETE") {
      target.erase(it);
      return commit_semantic(std::move(next));
    }
    if (method == "PUT") {
      Item item = from_json(body);
      if (key_of(item) != key && find(target, key_of(item)) != target.end()) {
        throw Error(ErrorCode::kConflict, kind + " entry already exists", key_of(item).back());
      }
      *it = std::move(item);
      return commit_semantic(std::move(next));
    }
    throw Error(ErrorCode::kNotFound, "unsupported method for " + kind, kind);
  };

  if (kind == "groups") {
    if (method == "GET" && n == 5 && parts[4] == "resolved") {
      const JointGroup g = resolve_group(*p.model, p.semantic, parts[3]);
      return Json{{"name", g.name}, {"joints", g.joints}, {"links", g.links}, {"is_chain", g.is_chain},
                  {"tip_link", g.tip_link}};
    }
    return crud(
        &SemanticModel::groups, [](const PlanningGroup& g) { return std::vector<std::string>{g.name}; }, group_to_json,
        group_from_json, 1);
  }
  if (kind == "group_states") {
    return crud(
        &SemanticModel::group_states, [](const GroupState& s) { return std::vector<std::string>{s.group, s.name}; },
        group_state_to_json, group_state_from_json, 2);
  }
  if (kind == "end_effectors") {
    return crud(
        &SemanticModel::end_effectors, [](const EndEffector& e) { return std::vector<std::string>{e.name}; },
        end_effector_to_json, end_effector_from_json, 1);
  }
  if (kind == "virtual_joints") {
    return crud(
        &SemanticModel::virtual_joints, [](const VirtualJoint& v) { return std::vector<std::string>{v.name}; },
        virtual_joint_to_json, virtual_joint_from_json, 1);
  }
  if (kind == "passive_joints") {
    return crud(
        &SemanticModel::passive_joints, [](const std::string& j) { return std::vector<std::string>{j}; },
        [](const std::string& j) { return Json{{"name", j}}; },
        [](const Json& j) { return required_string(j, "name"); }, 1);
  }
  throw Error(ErrorCode::kNotFound, "unknown SRDF collection '" + kind + "'", kind);
}

Json Service::plan(const Json& body) {
  const Project& p = require_project();
  const std::string group = required_string(body, "group");
  const ConfigBundle generated = generate_bundle(*p.model, p.semantic, p.options);
  const LoadedBundle bundle = load_bundle(generated, p.model);

  PlanRequest request = make_request(bundle, group);
  PlanningScene scene;
  scene.model = bundle.model;
  scene.semantic = bundle.semantic;
  scene.acm = bundle.semantic->disabled;
  scene.world = p.world;
  request.start = merge_state(*p.model, scene.virtual_joint(), p.state, body.value("start", Json()));
  if (body.contains("seed")) request.seed = body.at("seed").get<std::uint64_t>();
  if (body.contains("time_budget")) request.time_budget = body.at("time_budget").get<double>();
  if (body.contains("planner")) request.planner = body.at("planner").get<std::string>();

  if (!body.contains("goal") || !body.at("goal").is_object()) {
    throw Error(ErrorCode::kParse, "plan request needs a goal object", "goal");
  }
  const Json& goal = body.at("goal");
  if (goal.contains("named")) {
    const std::string name = goal.at("named").get<std::string>();
    const GroupState* s = bundle.semantic->find_state(name, group);
    if (s == nullptr) throw Error(ErrorCode::kNotFound, "unknown named pose '" + name + "'", name);
    request.goal = JointGoal{RobotState{s->values}, bundle.planning.goal_tolerance};
  } else if (goal.contains("joints")) {
    request.goal = JointGoal{state_from_json(goal.at("joints")), bundle.planning.goal_tolerance};
  } else if (goal.contains("pose")) {
    request.goal = PoseGoal{pose_from_json(goal.at("pose")), goal.value("link", std::string())};
  } else {
    throw Error(ErrorCode::kParse, "goal needs 'named', 'joints' or 'pose'", "goal");
  }

  const PlanResponse resp = robosetup::plan(scene, request, *registry_);
  Json path = Json::array();
  for (const auto& s : resp.path) path.push_back(state_to_json(s));
  Json out{{"success", resp.success},
           {"message", resp.message},
           {"start", state_to_json(resp.start)},
           {"goal", state_to_json(resp.goal)},
           {"path", path},
           {"planning_time", resp.planning_time},
           {"checks_performed", resp.checks_performed},
           {"iterations", resp.iterations}};
  if (resp.trajectory) out["trajectory"] = trajectory_to_json(*resp.trajectory);
  return out;
}

Json Service::random_state(const Json& body) {
  const Project& p = require_project();
  const std::string group_name = body.is_object() ? body.value("group", std::string()) : std::string();
  const std::uint64_t seed = body.is_object() ? body.value("seed", std::uint64_t{0}) : 0;
  const VirtualJoint* vj = p.semantic.sampled_virtual_joint();
  PlanningScene scene;
  scene.model = p.model;
  scene.semantic = std::make_shared<SemanticModel>(p.semantic);
  const JointGroup group = scene.group(group_name);
  CollisionContext context(*p.model, p.semantic.disabled, p.world, vj);
  Rng rng(seed);
  constexpr int kAttempts = 1000;
  for (int attempt = 1; attempt <= kAttempts; ++attempt) {
    const RobotState s = sample_random_state(*p.model, group, rng, vj, &p.state);
    if (!context.check(s, {true}).in_collision) return Json{{"state", state_to_json(s)}, {"attempts", attempt}};
  }
  throw Error(ErrorCode::kPlanFailed, "no collision-free state found in 1000 samples", group.name);
}

void Service::serve(const std::string& host, int port, const fs::path& static_dir,
                    const std::function<void(int)>& on_ready) {
  {
    std::unique_lock lock(mutex_);
    if (server_) throw Error(ErrorCode::kConflict, "service is already serving");
    server_ = std::make_unique<Server>();
  }
  httplib::Server& http = server_->http;
  auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpReply r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  const std::string api = R"(/api/.*)";
  http.Get(api, bridge);
  http.Post(api, bridge);
  http.Put(api, bridge);
  http.Delete(api, bridge);
  if (!static_dir.empty()) {
    if (!http.set_mount_point("/", static_dir.string())) {
      throw Error(ErrorCode::kIo, "static asset directory '" + static_dir.string() + "' not found");
    }
  } else {
    http.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!doctype html><title>robosetup</title><p>robosetup service is running. The setup UI is not installed "
          "here; the JSON API lives under <code>/api</code>.</p>\n",
          "text/html");
    });
  }
  const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  if (on_ready) on_ready(bound);
  http.listen_after_bind();
}

void Service::stop() {
  if (server_) server_->http.stop();
}

}  // namespace robosetup
