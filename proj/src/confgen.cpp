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

#include "robosetup/confgen.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "robosetup/config_text.hpp"
#include "robosetup/error.hpp"
#include "robosetup/text.hpp"

namespace robosetup {

namespace fs = std::filesystem;

void GenOptions::check() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorCode::kValidation, std::string(name) + " must be positive", name);
  };
  if (!(velocity_scaling > 0.0 && velocity_scaling <= 1.0)) {
    throw Error(ErrorCode::kValidation, "velocity_scaling must lie in (0, 1]", "velocity_scaling");
  }
  positive(default_velocity, "default_velocity");
  positive(default_acceleration, "default_acceleration");
  positive(time_budget, "time_budget");
  positive(goal_tolerance, "goal_tolerance");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw Error(ErrorCode::kValidation, "goal_bias must lie in [0, 1]", "goal_bias");
  if (!(resolution_fraction > 0.0 && resolution_fraction < 1.0)) {
    throw Error(ErrorCode::kValidation, "resolution_fraction must lie in (0, 1)", "resolution_fraction");
  }
  if (service_port <= 0 || service_port > 65535) throw Error(ErrorCode::kValidation, "bad service port", "service_port");
  ik.check();
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::uint64_t to_u64(std::int64_t v, const char* key) {
  if (v < 0) throw Error(ErrorCode::kParse, std::string(key) + " must be nonnegative", key);
  return static_cast<std::uint64_t>(v);
}

}  // namespace

const JointLimitEntry* JointLimitsConfig::find(std::string_view joint) const {
  for (const auto& j : joints) {
    if (j.joint == joint) return &j;
  }
  return nullptr;
}

bool KinematicsGroupConfig::operator==(const KinematicsGroupConfig& o) const {
  return group == o.group && chain == o.chain && solver == o.solver && tip_link == o.tip_link &&
         params.position_tolerance == o.params.position_tolerance &&
         params.orientation_tolerance == o.params.orientation_tolerance &&
         params.max_iterations == o.params.max_iterations && params.damping == o.params.damping &&
         params.restarts == o.params.restarts && params.seed == o.params.seed;
}

const KinematicsGroupConfig* KinematicsConfig::find(std::string_view group) const {
  for (const auto& g : groups) {
    if (g.group == group) return &g;
  }
  return nullptr;
}

std::string joint_limits_to_text(const JointLimitsConfig& config) {
  ConfigWriter w;
  w.comment("Joint velocity and acceleration limits (rad/s, rad/s^2; m/s, m/s^2 for prismatic joints).");
  w.comment("Used by time parameterization.");
  std::vector<std::string> names;
  for (const auto& j : config.joints) names.push_back(j.joint);
  w.put("joints", join(names));
  for (const auto& j : config.joints) {
    w.blank();
    w.put(j.joint + ".max_velocity", j.max_velocity);
    w.put(j.joint + ".max_acceleration", j.max_acceleration);
  }
  return w.str();
}

JointLimitsConfig parse_joint_limits(std::string_view text) {
  const auto doc = ConfigDoc::parse(text, "joint_limits.yaml");
  JointLimitsConfig out;
  for (const auto& name : split_ws(doc.get("joints"))) {
    JointLimitEntry e{name, doc.get_double(name + ".max_velocity"), doc.get_double(name + ".max_acceleration")};
    if (!(e.max_velocity > 0.0) || !(e.max_acceleration > 0.0)) {
      throw Error(ErrorCode::kParse, "joint_limits.yaml: limits for '" + name + "' must be positive", name);
    }
    out.joints.push_back(std::move(e));
  }
  return out;
}

std::string kinematics_to_text(const KinematicsConfig& config) {
  ConfigWriter w;
  w.comment("Inverse kinematics solver per planning group.");
  w.comment("Groups that are not serial chains have no solver.");
  std::vector<std::string> names;
  for (const auto& g : config.groups) names.push_back(g.group);
  w.put("groups", join(names));
  for (const auto& g : config.groups) {
    w.blank();
    w.put(g.group + ".chain", g.chain ? "true" : "false");
    w.put(g.group + ".solver", g.solver);
    if (!g.chain) continue;
    w.put(g.group + ".tip_link", g.tip_link);
    w.put(g.group + ".position_tolerance", g.params.position_tolerance);
    w.put(g.group + ".orientation_tolerance", g.params.orientation_tolerance);
    w.put_int(g.group + ".max_iterations", g.params.max_iterations);
    w.put(g.group + ".damping", g.params.damping);
    w.put_int(g.group + ".restarts", g.params.restarts);
    w.put(g.group + ".seed", std::to_string(g.params.seed));
  }
  return w.str();
}

KinematicsConfig parse_kinematics(std::string_view text) {
  const auto doc = ConfigDoc::parse(text, "kinematics.conf");
  KinematicsConfig out;
  for (const auto& name : split_ws(doc.get("groups"))) {
    KinematicsGroupConfig g;
    g.group = name;
    const std::string& chain = doc.get(name + ".chain");
    if (chain != "true" && chain != "false") {
      throw Error(ErrorCode::kParse, "kinematics.conf: " + name + ".chain must be true or false", name);
    }
    g.chain = chain == "true";
    g.solver = doc.get(name + ".solver");
    if (g.chain) {
      g.tip_link = doc.get(name + ".tip_link");
      g.params.position_tolerance = doc.get_double(name + ".position_tolerance");
      g.params.orientation_tolerance = doc.get_double(name + ".orientation_tolerance");
      g.params.max_iterations = static_cast<int>(doc.get_int(name + ".max_iterations"));
      g.params.damping = doc.get_double(name + ".damping");
      g.params.restarts = static_cast<int>(doc.get_int(name + ".restarts"));
      g.params.seed = to_u64(doc.get_int(name + ".seed"), "seed");
      g.params.check();
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

std::string planning_to_text(const PlanningConfig& config) {
  ConfigWriter w;
  w.comment("Motion planning defaults.");
  w.comment("resolution_fraction: collision-check step as a fraction of each group's space extent;");
  w.comment("the planner's extension step equals that collision step.");
  w.put("planner", config.planner);
  w.put("goal_bias", config.goal_bias);
  w.put("time_budget", config.time_budget);
  w.put("goal_tolerance", config.goal_tolerance);
  w.put("resolution_fraction", config.resolution_fraction);
  w.put("seed", std::to_string(config.seed));
  if (config.acm_seed) w.put("acm_seed", std::to_string(*config.acm_seed));
  w.put("adapters", join(config.adapters));
  std::vector<std::string> names;
  for (const auto& g : config.groups) names.push_back(g.group);
  w.put("groups", join(names));
  for (const auto& g : config.groups) {
    w.blank();
    w.put(g.group + ".projection", join(g.joints));
    w.put(g.group + ".space_extent", g.space_extent);
  }
  return w.str();
}

PlanningConfig parse_planning(std::string_view text) {
  const auto doc = ConfigDoc::parse(text, "planning.conf");
  PlanningConfig out;
  out.planner = doc.get("planner");
  out.goal_bias = doc.get_double("goal_bias");
  out.time_budget = doc.get_double("time_budget");
  out.goal_tolerance = doc.get_double("goal_tolerance");
  out.resolution_fraction = doc.get_double("resolution_fraction");
  out.seed = to_u64(doc.get_int("seed"), "seed");
  if (doc.has("acm_seed")) out.acm_seed = to_u64(doc.get_int("acm_seed"), "acm_seed");
  out.adapters = split_ws(doc.get_string("adapters", ""));
  for (const auto& name : split_ws(doc.get_string("groups", ""))) {
    out.groups.push_back({name, split_ws(doc.get(name + ".projection")), doc.get_double(name + ".space_extent")});
  }
  if (!(out.time_budget > 0.0)) throw Error(ErrorCode::kParse, "planning.conf: time_budget must be positive", "time_budget");
  if (!(out.resolution_fraction > 0.0 && out.resolution_fraction < 1.0)) {
    throw Error(ErrorCode::kParse, "planning.conf: resolution_fraction must lie in (0, 1)", "resolution_fraction");
  }
  return out;
}

std::string demo_manifest_to_text(const DemoManifest& m) {
  ConfigWriter w;
  w.comment("Demo startup description, executed top to bottom by `robosetup serve --bundle DIR`.");
  w.put("model", m.model);
  w.put("semantic", m.semantic);
  w.put("service.host", m.service_host);
  w.put_int("service.port", m.service_port);
  w.put("demo.group", m.demo_group);
  for (std::size_t i = 0; i < m.steps.size(); ++i) w.put("step." + std::to_string(i + 1), m.steps[i]);
  return w.str();
}

DemoManifest parse_demo_manifest(std::string_view text) {
  const auto doc = ConfigDoc::parse(text, "demo.manifest");
  DemoManifest m;
  m.model = doc.get("model");
  m.semantic = doc.get("semantic");
  m.service_host = doc.get_string("service.host", "127.0.0.1");
  m.service_port = static_cast<int>(doc.get_int("service.port", 8080));
  m.demo_group = doc.get_string("demo.group", "");
  for (int i = 1; doc.has("step." + std::to_string(i)); ++i) m.steps.push_back(doc.get("step." + std::to_string(i)));
  return m;
}

Json ConfigBundle::manifest_json() const {
  Json files_json = Json::array();
  for (const auto& f : manifest) files_json.push_back(Json{{"path", f.path}, {"sha256", f.sha256}});
  return Json{{"files", files_json}, {"inputs_digest", inputs_digest}};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

void append_pose(std::string& out, const Pose& p) {
  const auto m = p.matrix();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) out += ' ' + format_double(m(r, c));
  }
}

void append_shape(std::string& out, const Shape& s) {
  out += ' ' + shape_type_name(s);
  if (const auto* sp = std::get_if<Sphere>(&s)) {
    out += ' ' + format_double(sp->radius);
  } else if (const auto* b = std::get_if<Box>(&s)) {
    for (int i = 0; i < 3; ++i) out += ' ' + format_double(b->half_extents[i]);
  } else if (const auto* c = std::get_if<Cylinder>(&s)) {
    out += ' ' + format_double(c->radius) + ' ' + format_double(c->length);
  } else {
    for (const auto& v : std::get<ConvexMesh>(s).vertices) {
      for (int i = 0; i < 3; ++i) out += ' ' + format_double(v[i]);
    }
  }
}

}  // namespace

std::string model_fingerprint(const RobotModel& model) {
  std::string out = "robot " + model.name() + "\n";
  for (const auto& l : model.links()) {
    out += "link " + l.name + "\n";
    for (const auto& g : l.collision) {
      out += "  collision";
      append_shape(out, g.shape);
      append_pose(out, g.origin);
      out += '\n';
    }
  }
  for (const auto& j : model.joints()) {
    out += "joint " + j.name + ' ' + std::string(to_string(j.kind)) + ' ' + j.parent_link + ' ' + j.child_link;
    append_pose(out, j.origin);
    for (int i = 0; i < 3; ++i) out += ' ' + format_double(j.axis[i]);
    if (j.limits) {
      out += " limits " + format_double(j.limits->lower) + ' ' + format_double(j.limits->upper) + ' ' +
             format_double(j.limits->max_velocity);
    }
    if (j.mimic) out += " mimic";
    out += '\n';
  }
  return out;
}

ConfigBundle generate_bundle(const RobotModel& model, const SemanticModel& semantic, const GenOptions& options) {
  options.check();
  const auto report = validate_semantic(model, semantic);
  for (const auto& f : report.findings) {
    if (f.severity == Severity::kError) {
      throw Error(ErrorCode::kValidation, "semantic model has errors: " + f.element + ": " + f.message, f.element);
    }
  }
  const std::string robot = semantic.robot_name.empty() ? model.name() : semantic.robot_name;

  JointLimitsConfig limits;
  for (const auto& name : model.active_joints()) {
    const Joint& j = model.joint(name);
    const double v = j.limits && j.limits->max_velocity > 0.0 ? j.limits->max_velocity : options.default_velocity;
    limits.joints.push_back({name, v * options.velocity_scaling, options.default_acceleration});
  }

  const VirtualJoint* vj = semantic.sampled_virtual_joint();
  KinematicsConfig kin;
  PlanningConfig plan;
  plan.planner = options.planner;
  plan.goal_bias = options.goal_bias;
  plan.time_budget = options.time_budget;
  plan.goal_tolerance = options.goal_tolerance;
  plan.resolution_fraction = options.resolution_fraction;
  plan.seed = options.planner_seed;
  plan.acm_seed = options.acm_seed;
  plan.adapters = options.adapters;
  std::string demo_group;
  for (const auto& g : semantic.groups) {
    const JointGroup jg = resolve_group(model, semantic, g.name);
    KinematicsGroupConfig kc;
    kc.group = g.name;
    kc.chain = jg.is_chain;
    if (jg.is_chain) {
      auto it = options.kinematics_solver.find(g.name);
      kc.solver = it != options.kinematics_solver.end() ? it->second : "dls";
      kc.tip_link = jg.tip_link;
      kc.params = options.ik;
      if (demo_group.empty()) demo_group = g.name;
    } else {
      kc.solver = "none";
    }
    kin.groups.push_back(std::move(kc));
    plan.groups.push_back({g.name, default_projection(model, jg).joints, space_extent(model, jg, vj)});
  }
  if (demo_group.empty() && !semantic.groups.empty()) demo_group = semantic.groups.front().name;

  // Benchmark skeleton: one query on the demo group, one planner, no sweeps.
  ConfigWriter bench;
  bench.comment("Benchmark configuration. Relative paths resolve against this file's directory.");
  bench.comment("States: 'default', a named group state, or inline 'joint=value joint=value'.");
  bench.comment("Sweeps: list ids under 'sweeps' and give <id>.parameter/.lower/.upper/.increment,");
  bench.comment("e.g. parameter planner.goal_bias, resolution_fraction or time_budget.");
  bench.put("urdf", options.model_path);
  bench.put("srdf", robot + ".srdf");
  bench.put("world", "");
  bench.put("seed", std::to_string(options.planner_seed));
  bench.put_int("repetitions", 3);
  bench.put("time_budget", options.time_budget);
  bench.put("resolution_fraction", options.resolution_fraction);
  bench.put("goal_tolerance", options.goal_tolerance);
  bench.blank();
  bench.put("queries", demo_group.empty() ? "" : "q1");
  if (!demo_group.empty()) {
    // first named state that actually moves away from the default start
    std::string goal = "default";
    const RobotState start = default_state(model, vj);
    for (const auto& s : semantic.group_states) {
      if (s.group != demo_group) continue;
      const bool moves = std::any_of(s.values.begin(), s.values.end(), [&](const auto& kv) {
        auto it = start.values.find(kv.first);
        return it == start.values.end() || it->second != kv.second;
      });
      if (moves) {
        goal = s.name;
        break;
      }
    }
    bench.put("q1.group", demo_group);
    bench.put("q1.start", "default");
    bench.put("q1.goal", goal);
  }
  bench.blank();
  bench.put("planners", "p1");
  bench.put("p1.type", options.planner);
  bench.put("p1.acm", "on");
  bench.put("p1.goal_bias", options.goal_bias);
  bench.blank();
  bench.put("sweeps", "");

  DemoManifest demo;
  demo.model = options.model_path;
  demo.semantic = robot + ".srdf";
  demo.service_host = options.service_host;
  demo.service_port = options.service_port;
  demo.demo_group = demo_group;
  demo.steps = {"load_model", "load_semantic", "start_service", "open_demo_pane"};

  ConfigBundle bundle;
  const std::vector<std::pair<std::string, std::string>> ordered{
      {"config/" + robot + ".srdf", serialize_srdf(semantic)},
      {"config/joint_limits.yaml", joint_limits_to_text(limits)},
      {"config/kinematics.conf", kinematics_to_text(kin)},
      {"config/planning.conf", planning_to_text(plan)},
      {"config/benchmark.conf", bench.str()},
      {"config/demo.manifest", demo_manifest_to_text(demo)},
  };
  std::string digest_input = model_fingerprint(model);
  digest_input += serialize_srdf(semantic);
  for (const auto& [path, text] : ordered) {
    bundle.files[path] = text;
    bundle.manifest.push_back({path, sha256_hex(text)});
    digest_input += path + '\n' + text;
  }
  bundle.inputs_digest = sha256_hex(digest_input);
  return bundle;
}

std::string read_text_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + file.string() + "'", file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& file, std::string_view content) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  std::random_device rd;
  const fs::path tmp = file.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + tmp.string() + "'", file.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIo, "write failed for '" + file.string() + "'", file.string());
    }
  }
  fs::rename(tmp, file, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into '" + file.string() + "'", file.string());
  }
}

std::vector<fs::path> write_bundle(const ConfigBundle& bundle, const fs::path& directory, bool overwrite) {
  if (!overwrite) {
    for (const auto& f : bundle.manifest) {
      if (fs::exists(directory / f.path)) {
        throw Error(ErrorCode::kConflict, "'" + (directory / f.path).string() + "' exists; pass overwrite to replace it",
                    f.path);
      }
    }
  }
  std::vector<fs::path> written;
  for (const auto& f : bundle.manifest) {
    const fs::path target = directory / f.path;
    write_text_file(target, bundle.files.at(f.path));
    written.push_back(target);
  }
  return written;
}

ConfigBundle read_bundle(const fs::path& directory) {
  const fs::path config = directory / "config";
  if (!fs::is_directory(config)) throw Error(ErrorCode::kNotFound, "no config directory in '" + directory.string() + "'");
  ConfigBundle bundle;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(config)) {
    if (entry.path().extension() == ".srdf") names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  for (const char* n : {"joint_limits.yaml", "kinematics.conf", "planning.conf", "benchmark.conf", "demo.manifest"}) {
    names.emplace_back(n);
  }
  for (const auto& n : names) {
    const std::string rel = "config/" + n;
    if (!fs::exists(directory / rel)) continue;
    bundle.files[rel] = read_text_file(directory / rel);
    bundle.manifest.push_back({rel, sha256_hex(bundle.files[rel])});
  }
  return bundle;
}

}  // namespace robosetup
