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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "robosetup/acm_gen.hpp"
#include "robosetup/bench.hpp"
#include "robosetup/confgen.hpp"
#include "robosetup/error.hpp"
#include "robosetup/json_io.hpp"
#include "robosetup/planning.hpp"
#include "support.hpp"

using namespace robosetup;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string reason_of(const AllowedCollisionMatrix& acm, const LinkPair& p) {
  const AcmEntry* e = acm.find(p.first, p.second);
  return e != nullptr && e->disabled ? std::string(to_string(e->reason)) : std::string();
}

// 1 -------------------------------------------------------------------------
Outcome acm_oracle() {
  const auto t0 = Clock::now();
  std::size_t pairs = 0, mismatches = 0;
  for (const char* fixture : {"two_link.urdf", "three_link_toy.urdf"}) {
    const auto m = ts::model(fixture);
    const auto expected = oracle::classify(oracle::grid_pair_counts(*m, 181));
    AcmGenParams p;
    p.rng_seed = 1;
    const AcmReport r = generate_acm(*m, p);
    if (r.pairs.size() != expected.size()) ++mismatches;
    for (const auto& [pair, cls] : expected) {
      ++pairs;
      if (reason_of(r.acm, pair) != cls) ++mismatches;
    }
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 60.0,
          std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches, " + fmt(t) + " s"};
}

// 2 -------------------------------------------------------------------------
Outcome check_reduction() {
  const auto m = ts::model("sample_arm.urdf");
  AcmGenParams p;
  p.rng_seed = 7;
  const AcmReport report = generate_acm(*m, p);
  const CollisionContext with(*m, report.acm, PlanningSceneWorld{});
  const CollisionContext without(*m, AllowedCollisionMatrix{}, PlanningSceneWorld{});
  Rng rng(2024);
  std::size_t a = 0, b = 0, mismatches = 0, raw_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const RobotState s = ts::random_state(*m, rng);
    const auto rw = with.check(s);
    const auto ro = without.check(s);
    // Adjacent and Always pairs touch by construction; a sound matrix must
    // agree with the unfiltered check on every other contact.
    bool expected = false;
    for (const auto& c : ro.contacts) {
      const std::string why = reason_of(report.acm, {c.first, c.second});
      expected |= why != "Adjacent" && why != "Always";
    }
    mismatches += rw.in_collision != expected ? 1 : 0;
    raw_mismatches += rw.in_collision != ro.in_collision ? 1 : 0;
    a += rw.checks_performed;
    b += ro.checks_performed;
  }
  const double reduction = 1.0 - static_cast<double>(a) / static_cast<double>(b);
  return {reduction >= 0.30 && mismatches == 0,
          "checks " + std::to_string(a) + " vs " + std::to_string(b) + " (" + fmt(100 * reduction) +
              "% fewer), verdict mismatches " + std::to_string(mismatches) + ", states where Adjacent/Always contacts flip the raw verdict " +
              std::to_string(raw_mismatches)};
}

// 3 -------------------------------------------------------------------------
Outcome fk_jacobian() {
  double fk_worst = 0.0, jac_worst = 0.0;
  int states = 0, jacobians = 0;
  Rng rng(3);
  for (const char* fixture : {"sample_arm.urdf", "planar_2link.urdf", "three_link_toy.urdf", "always_overlap.urdf"}) {
    const auto m = ts::model(fixture);
    // one group per link: the active joints between the root and that link
    std::vector<std::pair<std::string, JointGroup>> tips;
    for (std::size_t li = 0; li < m->links().size(); ++li) {
      const auto path = m->joints_to_root(li);
      JointGroup g;
      for (const auto& j : m->active_joints()) {
        if (std::find(path.begin(), path.end(), *m->joint_index(j)) != path.end()) g.joints.push_back(j);
      }
      if (!g.joints.empty()) tips.emplace_back(m->links()[li].name, g);
    }
    for (int i = 0; i < 250; ++i, ++states) {
      const RobotState s = ts::random_state(*m, rng);
      const auto fk = forward_kinematics(*m, s);
      const auto ref = oracle::forward_kinematics(*m, s.values);
      for (const auto& [link, pose] : fk) fk_worst = std::max(fk_worst, (pose.matrix() - ref.at(link)).cwiseAbs().maxCoeff());
      for (const auto& [tip, g] : tips) {
        const auto jac = jacobian(*m, g, s, tip);
        const auto fd = oracle::fd_jacobian(*m, g.joints, s.values, tip);
        jac_worst = std::max(jac_worst, (jac - fd).cwiseAbs().maxCoeff());
        ++jacobians;
      }
    }
  }
  return {states == 1000 && fk_worst <= 1e-9 && jac_worst <= 1e-5,
          std::to_string(states) + " states, " + std::to_string(jacobians) + " Jacobians, FK max dev " + fmt(fk_worst) + ", Jacobian max dev " + fmt(jac_worst)};
}

// 4 -------------------------------------------------------------------------
Outcome inverse_kinematics() {
  const auto m = ts::model("sample_arm.urdf");
  const JointGroup g = resolve_group(*m, ts::semantic(*m, "sample_arm.srdf"), "manipulator");
  Rng rng(404);
  int solved = 0, unverified = 0;
  for (int i = 0; i < 100; ++i) {
    const Pose target = forward_kinematics(*m, ts::random_state(*m, rng)).at(g.tip_link);
    IkParams params;
    params.seed = derive_seed(404, static_cast<std::uint64_t>(i));
    const IkResult r = solve_ik(*m, g, target, default_state(*m), params);
    if (!r.success) continue;
    ++solved;
    const auto [pe, oe] = pose_error(forward_kinematics(*m, r.state).at(g.tip_link), target);
    bool ok = pe <= 1e-4 && oe <= 1e-3;
    for (const auto& j : g.joints) {
      const auto& lim = *m->joint(j).limits;
      ok = ok && r.state.at(j) >= lim.lower && r.state.at(j) <= lim.upper;
    }
    unverified += ok ? 0 : 1;
  }
  return {solved >= 95 && unverified == 0,
          std::to_string(solved) + "/100 solved, " + std::to_string(unverified) + " failed FK verification"};
}

// 5 -------------------------------------------------------------------------
Outcome planner_validity() {
  const auto m = ts::model("planar_2link.urdf");
  PlanningScene scene;
  scene.model = m;
  scene.semantic = std::make_shared<SemanticModel>(ts::semantic(*m, "planar_2link.srdf"));
  scene.acm = scene.semantic->disabled;
  scene.world = world_from_json(Json::parse(read_text_file(ts::data("planar_scene.json"))));
  const JointGroup g = scene.group("arm");
  const auto bounds = group_bounds(*m, g);
  const double step = 0.01 * space_extent(bounds);
  const CollisionContext ctx(*m, scene.acm, scene.world);
  const auto free = [&](const RobotState& s) { return !ctx.check(s).in_collision; };
  const auto limits = resolve_limits(*m, {"j1", "j2"}, {});
  const RobotState start{scene.semantic->find_state("left")->values};
  const RobotState goal{scene.semantic->find_state("right")->values};

  const bool blocked = !validate_motion(bounds, start, goal, step, free).valid;
  int solved = 0;
  std::size_t edge_violations = 0, limit_violations = 0;
  double slowest = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PlanRequest r;
    r.group = "arm";
    r.start = start;
    r.goal = JointGoal{goal, 1e-3};
    r.seed = seed;
    r.time_budget = 5.0;
    const auto t0 = Clock::now();
    const PlanResponse res = plan(scene, r);
    const double t = seconds_since(t0);
    slowest = std::max(slowest, t);
    if (!res.success || t > 5.0 || !res.trajectory) continue;
    ++solved;
    for (std::size_t i = 0; i + 1 < res.path.size(); ++i) {
      edge_violations += validate_motion(bounds, res.path[i], res.path[i + 1], step / 2, free).valid ? 0 : 1;
    }
    const Trajectory dense = res.trajectory->resample(1000.0);
    for (const auto& pt : dense.points()) {
      for (std::size_t j = 0; j < 2; ++j) {
        limit_violations += std::abs(pt.velocities[j]) > limits[j].max_velocity + 1e-9 ? 1 : 0;
        limit_violations += std::abs(pt.accelerations[j]) > limits[j].max_acceleration + 1e-9 ? 1 : 0;
      }
    }
  }
  return {blocked && solved == 50 && edge_violations == 0 && limit_violations == 0,
          std::to_string(solved) + "/50 solved (slowest " + fmt(slowest) + " s), straight segment " +
              (blocked ? "blocked" : "FREE") + ", half-step violations " + std::to_string(edge_violations) +
              ", 1 kHz limit violations " + std::to_string(limit_violations)};
}

// 6 -------------------------------------------------------------------------
Outcome determinism() {
  const auto m = ts::model("sample_arm.urdf");
  std::vector<std::string> failed;

  auto acm_json = [&](unsigned threads) {
    AcmGenParams p;
    p.rng_seed = 7;
    p.threads = threads;
    return acm_report_to_json(generate_acm(*m, p)).dump();
  };
  const std::string acm1 = acm_json(1), acm1b = acm_json(1), acmn = acm_json(0), acm4 = acm_json(4);
  if (acm1 != acm1b || acm1 != acmn || acm1 != acm4) failed.push_back("acm");

  SemanticModel semantic = ts::semantic(*m, "sample_arm.srdf");
  semantic.disabled = acm_from_report_json(Json::parse(acmn));
  const SemanticModel reparsed = parse_srdf(serialize_srdf(semantic), *m);
  if (serialize_srdf(semantic) != serialize_srdf(reparsed)) failed.push_back("srdf");

  GenOptions opts;
  opts.model_path = ts::data("sample_arm.urdf").string();
  opts.acm_seed = 7;
  SemanticModel from_single = semantic;
  from_single.disabled = acm_from_report_json(Json::parse(acm1));
  const ConfigBundle b1 = generate_bundle(*m, from_single, opts);
  const ConfigBundle b2 = generate_bundle(*m, semantic, opts);
  if (b1.files != b2.files || b1.inputs_digest != b2.inputs_digest) failed.push_back("bundle");

  BenchConfig c;
  c.model = ts::model("planar_2link.urdf");
  c.semantic = std::make_shared<SemanticModel>(ts::semantic(*c.model, "planar_2link.srdf"));
  c.world = world_from_json(Json::parse(read_text_file(ts::data("planar_scene.json"))));
  c.queries.push_back({"around", "arm", RobotState{c.semantic->find_state("left")->values},
                       RobotState{c.semantic->find_state("right")->values}});
  c.queries.push_back({"short", "arm", RobotState{{{"j1", 0.0}, {"j2", 0.0}}}, RobotState{{{"j1", -0.6}, {"j2", 0.3}}}});
  c.planners = {{"rrt", "rrt", true, {}}, {"rrt_no_acm", "rrt", false, {}}};
  c.sweeps = {{"planner.goal_bias", 0.05, 0.15, 0.05}};
  c.repetitions = 2;
  c.seed = 99;
  auto columns = [&](unsigned threads) {
    c.threads = threads;
    std::ostringstream out;
    out.precision(17);
    for (const auto& r : run_benchmark(c)) out << r.success << ',' << r.path_length << '\n';
    return out.str();
  };
  const std::string bench1 = columns(1);
  if (bench1 != columns(1) || bench1 != columns(4)) failed.push_back("bench");

  std::string detail = "acm, srdf, bundle and bench columns compared at 1 vs N threads";
  if (!failed.empty()) {
    detail += "; differing:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

// 7 -------------------------------------------------------------------------
Outcome round_trips() {
  const auto m = ts::model("sample_arm.urdf");
  Rng rng(77);
  int srdf_cases = 0, srdf_failures = 0;
  for (int i = 0; i < 250; ++i) {
    const SemanticModel s = ts::generate_semantic(*m, rng);
    if (validate_semantic(*m, s).has_errors()) continue;
    ++srdf_cases;
    const std::string text = serialize_srdf(s);
    const SemanticModel back = parse_srdf(text, *m);
    if (!(back == s) || serialize_srdf(back) != text) ++srdf_failures;
  }

  int json_failures = 0;
  for (int i = 0; i < 200; ++i) {
    const RobotState s = ts::random_state(*m, rng);
    if (!(state_from_json(Json::parse(state_to_json(s).dump())) == s)) ++json_failures;
    PlanningSceneWorld w;
    w.upsert({"ball", Sphere{rng.uniform(0.01, 1)}, Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)),
              Vec3(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-3, 3))});
    w.upsert({"crate", Box{Vec3(rng.uniform(0.01, 1), 0.2, rng.uniform(0.01, 1))}, Vec3(rng.uniform(-2, 2), 0.1, 0.0),
              Vec3::Zero()});
    const std::string text = world_to_json(w).dump();
    const PlanningSceneWorld back = world_from_json(Json::parse(text));
    bool same = world_to_json(back).dump() == text && back.objects.size() == w.objects.size();
    for (std::size_t k = 0; same && k < w.objects.size(); ++k) {
      same = back.objects[k].xyz == w.objects[k].xyz && back.objects[k].rpy == w.objects[k].rpy &&
             shape_to_json(back.objects[k].shape) == shape_to_json(w.objects[k].shape);
    }
    json_failures += same ? 0 : 1;
  }
  return {srdf_cases >= 200 && srdf_failures == 0 && json_failures == 0,
          std::to_string(srdf_cases) + " SRDF cases (" + std::to_string(srdf_failures) + " failed), 200 state+scene cases (" +
              std::to_string(json_failures) + " failed)"};
}

// 8 -------------------------------------------------------------------------
Outcome sweep_law() {
  Rng rng(8);
  int spec_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const double lower = std::round(rng.uniform(-5000, 5000)) / 1000.0;
    const double inc = std::round(rng.uniform(1, 2000)) / 1000.0;
    const int k = static_cast<int>(rng.uniform(0, 40));
    double upper = lower + k * inc;
    if (i % 3 == 1) upper = std::nextafter(upper, -1e300);
    if (i % 3 == 2) upper = std::nextafter(upper, 1e300);
    upper = std::max(upper, lower);
    const auto n = sweep_values({"planner.goal_bias", lower, upper, inc}).size();
    // floor((upper - lower) / inc) + 1 with the 1e-9 * inc guard; the grid
    // construction makes the exact answer k + 1
    if (n != static_cast<std::size_t>(k) + 1) ++spec_failures;
  }

  int config_failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    BenchConfig c;
    c.model = ts::model("planar_2link.urdf");
    c.semantic = std::make_shared<SemanticModel>(ts::semantic(*c.model, "planar_2link.srdf"));
    const int nq = 1 + static_cast<int>(rng.uniform(0, 3));
    for (int q = 0; q < nq; ++q) {
      c.queries.push_back({"q" + std::to_string(q), "arm", RobotState{{{"j1", 0.0}, {"j2", 0.0}}},
                           RobotState{{{"j1", rng.uniform(-1, 1)}, {"j2", rng.uniform(-1, 1)}}}});
    }
    const int np = 1 + static_cast<int>(rng.uniform(0, 2));
    for (int p = 0; p < np; ++p) c.planners.push_back({"p" + std::to_string(p), "rrt", p == 0, {}});
    std::size_t cells = 1;
    const int ns = static_cast<int>(rng.uniform(0, 3));
    for (int s = 0; s < ns; ++s) {
      const int n = 1 + static_cast<int>(rng.uniform(0, 3));
      c.sweeps.push_back({s == 0 ? "planner.goal_bias" : "resolution_fraction", 0.02, 0.02 + 0.01 * (n - 1), 0.01});
      cells *= static_cast<std::size_t>(n);
    }
    c.repetitions = 1 + static_cast<int>(rng.uniform(0, 3));
    c.time_budget = 1.0;
    c.seed = static_cast<std::uint64_t>(trial);
    const auto rows = run_benchmark(c);
    const std::size_t expected = c.planners.size() * cells * c.queries.size() * static_cast<std::size_t>(c.repetitions);
    if (rows.size() != expected) ++config_failures;
  }
  return {spec_failures == 0 && config_failures == 0,
          "1000 specs (" + std::to_string(spec_failures) + " failed), 20 configs (" + std::to_string(config_failures) +
              " failed)"};
}

// 9 -------------------------------------------------------------------------
Outcome quickstart() {
  const fs::path dir = ts::scratch_dir("quickstart");
  const std::string bin = ROBOSETUP_CLI;
  const std::string urdf = fs::absolute(ts::data("sample_arm.urdf")).string();
  const std::string srdf = fs::absolute(ts::data("sample_arm.srdf")).string();
  const std::string log = (dir / "log.txt").string();
  const std::vector<std::string> chain{
      bin + " validate " + urdf + " --srdf " + srdf,
      bin + " acm " + urdf + " --samples 10000 --seed 7 -o " + (dir / "acm.json").string(),
      bin + " genconfig " + urdf + " --srdf " + srdf + " --acm " + (dir / "acm.json").string() + " -o " +
          (dir / "bundle").string(),
      bin + " plan " + (dir / "bundle").string() + " --goal '{\"named\": \"ready\"}' -o " + (dir / "traj.csv").string(),
  };
  const auto t0 = Clock::now();
  int step = 0;
  for (const auto& cmd : chain) {
    const int raw = std::system((cmd + " </dev/null >>" + log + " 2>&1").c_str());
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
      return {false, "step " + std::to_string(step + 1) + " exited with status " + std::to_string(WEXITSTATUS(raw))};
    }
    ++step;
  }
  const double t = seconds_since(t0);
  const std::string csv = read_text_file(dir / "traj.csv");
  const bool header = csv.rfind("t,shoulder_pan_joint_pos,", 0) == 0;
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  fs::remove_all(dir);
  return {header && lines > 2 && t < 60.0,
          "validate, acm, genconfig, plan in " + fmt(t) + " s, " + std::to_string(lines - 1) + " trajectory rows"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ACM oracle equivalence", acm_oracle},
      {"check reduction with identical verdicts", check_reduction},
      {"FK/Jacobian numerics", fk_jacobian},
      {"IK success and verification", inverse_kinematics},
      {"planner validity", planner_validity},
      {"determinism", determinism},
      {"round trips", round_trips},
      {"sweep and row laws", sweep_law},
      {"quickstart immediacy", quickstart},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " - "
              << o.detail << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
