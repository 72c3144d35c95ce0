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

#include "robosetup/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "robosetup/acm_gen.hpp"
#include "robosetup/bench.hpp"
#include "robosetup/confgen.hpp"
#include "robosetup/error.hpp"
#include "robosetup/facade.hpp"
#include "robosetup/json_io.hpp"
#include "robosetup/service.hpp"
#include "robosetup/srdf.hpp"

namespace robosetup {

namespace fs = std::filesystem;

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kValidation: return kExitInvalid;
    case ErrorCode::kNotFound: return kExitNotFound;
    case ErrorCode::kConflict: return kExitConflict;
    case ErrorCode::kIo: return kExitIo;
    case ErrorCode::kPlanFailed: return kExitPlanFailed;
    case ErrorCode::kInternal: return kExitInternal;
  }
  return kExitInternal;
}

// Inline JSON when the text starts with '{', otherwise a file name.
Json json_arg(const std::string& text) {
  const std::string source = !text.empty() && text.front() == '{' ? text : read_text_file(text);
  try {
    return Json::parse(source);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, "bad JSON in '" + text + "': " + e.what(), text);
  }
}

void emit(const std::string& text, const std::string& file, std::ostream& out) {
  if (file.empty() || file == "-") {
    out << text;
  } else {
    write_text_file(file, text);
  }
}

std::optional<fs::path> optional_path(const std::string& p) {
  return p.empty() ? std::nullopt : std::optional<fs::path>(p);
}

struct ValidateArgs {
  std::string urdf, assets, srdf;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const RobotModel model = load_urdf_file(a.urdf, optional_path(a.assets));
  ValidationReport report = validate_model(model);
  if (!a.srdf.empty()) {
    for (auto& f : validate_semantic(model, parse_srdf(read_text_file(a.srdf), model)).findings) {
      report.findings.push_back(std::move(f));
    }
  }
  out << report.to_text();
  out << model.name() << ": " << model.links().size() << " links, " << model.joints().size() << " joints, "
      << report.count(Severity::kError) << " errors, " << report.count(Severity::kWarning) << " warnings\n";
  return report.has_errors() ? kExitInvalid : kExitOk;
}

struct AcmArgs {
  std::string urdf, output;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  double threshold = 0.95;
  unsigned threads = 0;
  bool timing = false;
};

int cmd_acm(const AcmArgs& a, std::ostream& out, std::ostream& err) {
  const RobotModel model = load_urdf_file(a.urdf);
  AcmGenParams params;
  params.sample_count = a.samples;
  params.rng_seed = a.seed;
  params.always_threshold = a.threshold;
  params.threads = a.threads;
  const AcmReport report = generate_acm(model, params);
  emit(acm_report_to_json(report, a.timing).dump(2) + "\n", a.output, out);
  std::size_t disabled = 0;
  for (const auto& [reason, count] : report.disabled_by_reason) disabled += count;
  err << "acm: " << disabled << " of " << report.pairs.size() << " collidable pairs disabled\n";
  return kExitOk;
}

struct GenArgs {
  std::string urdf, srdf, output, acm, model_path;
  bool overwrite = false;
  double velocity_scaling = 1.0;
  std::uint64_t planner_seed = 0;
};

int cmd_genconfig(const GenArgs& a, std::ostream& out) {
  const RobotModel model = load_urdf_file(a.urdf);
  SemanticModel semantic;
  if (!a.srdf.empty()) {
    semantic = parse_srdf(read_text_file(a.srdf), model);
  } else {
    semantic.robot_name = model.name();
  }
  GenOptions options;
  options.model_path = a.model_path.empty() ? fs::absolute(a.urdf).string() : a.model_path;
  options.velocity_scaling = a.velocity_scaling;
  options.planner_seed = a.planner_seed;
  if (!a.acm.empty()) {
    const Json report = json_arg(a.acm);
    semantic.disabled = acm_from_report_json(report);
    options.acm_seed = report.at("params").at("seed").get<std::uint64_t>();
  }
  const ConfigBundle bundle = generate_bundle(model, semantic, options);
  write_bundle(bundle, a.output, a.overwrite);
  out << bundle.manifest_json().dump(2) << "\n";
  return kExitOk;
}

struct PlanArgs {
  std::string bundle, urdf, group, start, goal, world, output;
  std::optional<std::uint64_t> seed;
  std::optional<double> time_budget;
  double rate = 0.0;
};

int cmd_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
  LoadedBundle bundle = load_bundle(a.bundle, optional_path(a.urdf));
  const std::string group = a.group.empty() ? bundle.demo.demo_group : a.group;
  if (group.empty()) throw Error(ErrorCode::kValidation, "bundle has no demo group; pass --group", "group");
  PlanningSceneWorld world;
  if (!a.world.empty()) world = world_from_json(json_arg(a.world));
  const double tolerance = bundle.planning.goal_tolerance;

  MotionFacade facade(bundle, world);
  if (!a.start.empty()) facade.set_current_state(state_from_json(json_arg(a.start)));

  PlanRequest request = make_request(bundle, group);
  request.start = facade.current_state();
  if (a.seed) request.seed = *a.seed;
  if (a.time_budget) request.time_budget = *a.time_budget;
  const Json goal = json_arg(a.goal);
  if (goal.contains("named")) {
    const std::string name = goal.at("named").get<std::string>();
    const GroupState* s = bundle.semantic->find_state(name, group);
    if (s == nullptr) throw Error(ErrorCode::kNotFound, "unknown named pose '" + name + "'", name);
    request.goal = JointGoal{RobotState{s->values}, tolerance};
  } else if (goal.contains("pose")) {
    request.goal = PoseGoal{pose_from_json(goal.at("pose")), goal.value("link", std::string())};
  } else {
    // {"joints": {...}} or a flat state object
    request.goal = JointGoal{state_from_json(goal.contains("joints") ? goal.at("joints") : goal), tolerance};
  }
  const PlanResponse resp = plan(facade.scene(), request);
  if (!resp.success) throw Error(ErrorCode::kPlanFailed, "planning failed: " + resp.message, group);

  Trajectory trajectory = resp.trajectory ? *resp.trajectory : Trajectory{};
  if (!resp.trajectory) {
    std::vector<std::string> joints;
    for (const auto& b : group_bounds(*bundle.model, facade.scene().group(group), facade.scene().virtual_joint())) {
      joints.push_back(b.name);
    }
    trajectory = time_parameterize(joints, resp.path, resolve_limits(*bundle.model, joints, request.limits));
  }
  if (a.rate > 0.0) trajectory = trajectory.resample(a.rate);
  emit(trajectory_to_csv(trajectory), a.output, out);
  err << "plan: " << resp.path.size() << " waypoints, " << trajectory.duration() << " s, " << resp.checks_performed
      << " collision checks, solved in " << resp.planning_time << " s\n";
  return kExitOk;
}

struct BenchArgs {
  std::string config, output;
  int threads = -1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchConfig config = load_bench_config(a.config);
  if (a.threads >= 0) config.threads = static_cast<unsigned>(a.threads);
  const auto rows = run_benchmark(config);
  emit(write_results(rows), a.output, out);
  std::size_t ok = 0;
  for (const auto& r : rows) ok += r.success ? 1 : 0;
  err << "bench: " << ok << " of " << rows.size() << " runs succeeded\n";
  return kExitOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui, project, srdf;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  Service service;
  if (!a.project.empty()) {
    Json body{{"path", a.project}};
    if (!a.srdf.empty()) body["srdf"] = read_text_file(a.srdf);
    const HttpReply r = service.handle("POST", "/api/project", body.dump());
    if (r.status != 200) throw Error(ErrorCode::kValidation, "cannot load project: " + r.body, a.project);
  }
  service.serve(a.host, a.port, a.ui, [&](int port) {
    out << "robosetup serving on http://" << a.host << ":" << port << "/" << std::endl;
  });
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robot setup and planning toolkit", "robosetup"};
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a URDF (and optionally an SRDF)");
  validate->add_option("urdf", va.urdf, "URDF file")->required();
  validate->add_option("--assets", va.assets, "Mesh asset root");
  validate->add_option("--srdf", va.srdf, "SRDF file checked against the model");

  AcmArgs aa;
  auto* acm = app.add_subcommand("acm", "Generate the allowed collision matrix");
  acm->add_option("urdf", aa.urdf, "URDF file")->required();
  acm->add_option("--samples", aa.samples, "Random states to sample")->capture_default_str();
  acm->add_option("--seed", aa.seed, "RNG seed")->capture_default_str();
  acm->add_option("--threshold", aa.threshold, "Always-in-collision frequency")->capture_default_str();
  acm->add_option("--threads", aa.threads, "Worker threads (0: all cores)");
  acm->add_flag("--timing", aa.timing, "Include elapsed time in the report");
  acm->add_option("-o,--output", aa.output, "Report file (default stdout)");

  GenArgs ga;
  auto* gen = app.add_subcommand("genconfig", "Write the configuration bundle");
  gen->add_option("urdf", ga.urdf, "URDF file")->required();
  gen->add_option("--srdf", ga.srdf, "Semantic description");
  gen->add_option("--acm", ga.acm, "ACM report from `robosetup acm`");
  gen->add_option("-o,--output", ga.output, "Bundle directory")->required();
  gen->add_flag("--overwrite", ga.overwrite, "Replace existing files");
  gen->add_option("--velocity-scaling", ga.velocity_scaling, "Scale for velocity limits, in (0, 1]");
  gen->add_option("--planner-seed", ga.planner_seed, "Seed recorded in planning.conf");
  gen->add_option("--model-path", ga.model_path, "Model path to record (default: absolute URDF path)");

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a trajectory with a generated bundle");
  plan_cmd->add_option("bundle", pa.bundle, "Bundle directory")->required();
  plan_cmd->add_option("--urdf", pa.urdf, "Model file (default: from demo.manifest)");
  plan_cmd->add_option("--group", pa.group, "Planning group (default: demo group)");
  plan_cmd->add_option("--start", pa.start, "Start state: JSON file or inline object");
  plan_cmd->add_option("--goal", pa.goal, "Goal: {\"named\"}, {\"joints\"}, {\"pose\"} or a flat state")->required();
  plan_cmd->add_option("--world", pa.world, "Scene JSON with obstacles");
  plan_cmd->add_option("--seed", pa.seed, "Planner seed (default: planning.conf)");
  plan_cmd->add_option("--time-budget", pa.time_budget, "Seconds");
  plan_cmd->add_option("--rate", pa.rate, "Resample the trajectory at this rate in Hz");
  plan_cmd->add_option("-o,--output", pa.output, "Trajectory CSV (default stdout)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a benchmark configuration");
  bench->add_option("config", ba.config, "benchmark.conf")->required();
  bench->add_option("-o,--output", ba.output, "Results CSV (default stdout)");
  bench->add_option("--threads", ba.threads, "Worker threads (0: all cores)");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Run the HTTP+JSON service");
  serve->add_option("--host", sa.host, "Bind address")->capture_default_str();
  serve->add_option("--port", sa.port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--ui", sa.ui, "Directory of static UI assets");
  serve->add_option("--project", sa.project, "URDF to load at startup");
  serve->add_option("--srdf", sa.srdf, "SRDF to load with --project");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(va, out);
    if (*acm) return cmd_acm(aa, out, err);
    if (*gen) return cmd_genconfig(ga, out);
    if (*plan_cmd) return cmd_plan(pa, out, err);
    if (*bench) return cmd_bench(ba, out, err);
    if (*serve) return cmd_serve(sa, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what();
    if (!e.element().empty()) err << " [" << e.element() << "]";
    err << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error (internal_error): " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace robosetup
