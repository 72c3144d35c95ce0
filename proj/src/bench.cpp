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

#include "robosetup/bench.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "robosetup/config_text.hpp"
#include "robosetup/confgen.hpp"
#include "robosetup/error.hpp"
#include "robosetup/json_io.hpp"
#include "robosetup/text.hpp"

namespace robosetup {

namespace fs = std::filesystem;

void SweepSpec::check() const {
  if (parameter.empty()) throw Error(ErrorCode::kValidation, "sweep needs a parameter path", "parameter");
  if (!(increment > 0.0) || !std::isfinite(increment)) {
    throw Error(ErrorCode::kValidation, "sweep increment must be positive", parameter);
  }
  if (!(lower <= upper)) throw Error(ErrorCode::kValidation, "sweep lower bound exceeds upper bound", parameter);
}

std::vector<double> sweep_values(const SweepSpec& spec) {
  spec.check();
  const double guard = 1e-9 * spec.increment;
  const auto count = static_cast<std::size_t>(std::floor((spec.upper - spec.lower) / spec.increment + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = spec.lower + static_cast<double>(i) * spec.increment;
    if (std::abs(v - spec.upper) <= guard) v = spec.upper;
    values.push_back(v);
  }
  return values;
}

std::vector<ParameterAssignment> expand_sweep(const std::vector<SweepSpec>& specs) {
  std::vector<ParameterAssignment> out{{}};
  for (const auto& spec : specs) {
    const auto values = sweep_values(spec);
    std::vector<ParameterAssignment> next;
    next.reserve(out.size() * values.size());
    for (const auto& partial : out) {
      for (double v : values) {
        next.push_back(partial);
        next.back().emplace_back(spec.parameter, v);
      }
    }
    out = std::move(next);
  }
  return out;
}

void BenchConfig::check() const {
  if (!model) throw Error(ErrorCode::kValidation, "benchmark has no robot model", "urdf");
  if (repetitions < 1) throw Error(ErrorCode::kValidation, "repetitions must be at least 1", "repetitions");
  if (queries.empty()) throw Error(ErrorCode::kValidation, "benchmark needs at least one query", "queries");
  if (planners.empty()) throw Error(ErrorCode::kValidation, "benchmark needs at least one planner", "planners");
  if (!(time_budget > 0.0)) throw Error(ErrorCode::kValidation, "time_budget must be positive", "time_budget");
  for (const auto& s : sweeps) {
    s.check();
    const bool known = s.parameter.rfind("planner.", 0) == 0 || s.parameter == "resolution_fraction" ||
                       s.parameter == "time_budget" || s.parameter == "goal_tolerance";
    if (!known) throw Error(ErrorCode::kValidation, "unknown sweep parameter '" + s.parameter + "'", s.parameter);
  }
}

RobotState parse_state_spec(std::string_view spec, const RobotModel& model, const SemanticModel* semantic,
                            const std::string& group) {
  const VirtualJoint* vj = semantic != nullptr ? semantic->sampled_virtual_joint() : nullptr;
  RobotState state = default_state(model, vj);
  spec = trim(spec);
  if (spec.empty() || spec == "default") return state;
  if (spec.find('=') == std::string_view::npos) {
    const GroupState* gs = semantic != nullptr ? semantic->find_state(spec, group) : nullptr;
    if (gs == nullptr) {
      throw Error(ErrorCode::kNotFound, "unknown named state '" + std::string(spec) + "'", std::string(spec));
    }
    for (const auto& [k, v] : gs->values) state.values[k] = v;
    return state;
  }
  for (const auto& token : split_ws(spec)) {
    const auto eq = token.find('=');
    const auto value = eq == std::string::npos ? std::nullopt : parse_double(token.substr(eq + 1));
    if (!value) throw Error(ErrorCode::kParse, "bad state assignment '" + token + "'", token);
    const std::string name = token.substr(0, eq);
    if (state.values.count(name) == 0) throw Error(ErrorCode::kNotFound, "unknown state variable '" + name + "'", name);
    state.values[name] = *value;
  }
  return state;
}

BenchConfig parse_bench_config(std::string_view text, const fs::path& base_dir) {
  const auto doc = ConfigDoc::parse(text, "benchmark.conf");
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base_dir / path : path;
  };
  BenchConfig c;
  c.model = std::make_shared<RobotModel>(load_urdf_file(resolve(doc.get("urdf"))));
  const std::string srdf = doc.get_string("srdf", "");
  if (!srdf.empty()) {
    c.semantic = std::make_shared<SemanticModel>(parse_srdf(read_text_file(resolve(srdf)), *c.model));
  }
  const std::string world = doc.get_string("world", "");
  if (!world.empty()) c.world = world_from_json(Json::parse(read_text_file(resolve(world))));
  c.seed = static_cast<std::uint64_t>(doc.get_int("seed", 0));
  c.repetitions = static_cast<int>(doc.get_int("repetitions", 1));
  c.time_budget = doc.get_double("time_budget", 5.0);
  c.resolution_fraction = doc.get_double("resolution_fraction", 0.01);
  c.goal_tolerance = doc.get_double("goal_tolerance", 1e-3);
  c.threads = static_cast<unsigned>(doc.get_int("threads", 0));

  for (const auto& id : split_ws(doc.get_string("queries", ""))) {
    BenchQuery q;
    q.id = id;
    q.group = doc.get(id + ".group");
    q.start = parse_state_spec(doc.get_string(id + ".start", "default"), *c.model, c.semantic.get(), q.group);
    q.goal = parse_state_spec(doc.get(id + ".goal"), *c.model, c.semantic.get(), q.group);
    c.queries.push_back(std::move(q));
  }
  for (const auto& id : split_ws(doc.get_string("planners", ""))) {
    BenchPlanner p;
    p.id = id;
    p.type = doc.get_string(id + ".type", "rrt");
    const std::string acm = doc.get_string(id + ".acm", "on");
    if (acm != "on" && acm != "off") throw Error(ErrorCode::kParse, id + ".acm must be on or off", id);
    p.use_acm = acm == "on";
    for (const auto& [key, value] : doc.with_prefix(id + ".")) {
      if (key == "type" || key == "acm") continue;
      const auto v = parse_double(value);
      if (!v) throw Error(ErrorCode::kParse, "planner parameter " + id + "." + key + " is not a number", id);
      p.params[key] = *v;
    }
    c.planners.push_back(std::move(p));
  }
  for (const auto& id : split_ws(doc.get_string("sweeps", ""))) {
    c.sweeps.push_back({doc.get(id + ".parameter"), doc.get_double(id + ".lower"), doc.get_double(id + ".upper"),
                        doc.get_double(id + ".increment")});
  }
  c.check();
  return c;
}

BenchConfig load_bench_config(const fs::path& file) {
  return parse_bench_config(read_text_file(file), file.parent_path());
}

std::vector<BenchRow> run_benchmark(const BenchConfig& config, const PluginRegistry& registry) {
  config.check();
  const auto cells = expand_sweep(config.sweeps);
  const std::size_t nq = config.queries.size();
  const auto reps = static_cast<std::size_t>(config.repetitions);
  const std::size_t per_planner = cells.size() * nq * reps;
  const std::size_t total = config.planners.size() * per_planner;

  PlanningScene with_acm;
  with_acm.model = config.model;
  with_acm.semantic = config.semantic;
  with_acm.world = config.world;
  if (config.semantic) with_acm.acm = config.semantic->disabled;
  PlanningScene without_acm = with_acm;
  without_acm.acm = AllowedCollisionMatrix{};

  std::vector<BenchRow> rows(total);
  auto run_one = [&](std::size_t index) {
    const std::size_t p = index / per_planner;
    const std::size_t local = index % per_planner;
    const std::size_t cell = local / (nq * reps);
    const std::size_t q = (local / reps) % nq;
    const std::size_t rep = local % reps;
    const BenchPlanner& planner = config.planners[p];
    const BenchQuery& query = config.queries[q];

    BenchRow& row = rows[index];
    row.planner = planner.id;
    row.assignment = cells[cell];
    row.query = query.id;
    row.repetition = static_cast<int>(rep);

    PlanRequest req;
    req.group = query.group;
    req.start = query.start;
    req.planner = planner.type;
    req.planner_params = planner.params;
    req.time_budget = config.time_budget;
    req.resolution_fraction = config.resolution_fraction;
    req.seed = derive_seed(config.seed, local);
    req.adapters = {"fix_start_bounds"};
    double tolerance = config.goal_tolerance;
    for (const auto& [path, value] : row.assignment) {
      if (path.rfind("planner.", 0) == 0) {
        req.planner_params[path.substr(8)] = value;
      } else if (path == "resolution_fraction") {
        req.resolution_fraction = value;
      } else if (path == "time_budget") {
        req.time_budget = value;
      } else if (path == "goal_tolerance") {
        tolerance = value;
      }
    }
    req.goal = JointGoal{query.goal, tolerance};
    try {
      const PlanResponse resp = plan(planner.use_acm ? with_acm : without_acm, req, registry);
      row.success = resp.success;
      row.solve_time = resp.planning_time;
      row.checks_performed = resp.checks_performed;
      row.message = resp.message;
      if (resp.success) {
        const auto bounds = group_bounds(*config.model, with_acm.group(query.group), with_acm.virtual_joint());
        row.path_length = path_length(bounds, resp.path);
      }
    } catch (const std::exception& e) {
      row.success = false;
      row.message = e.what();
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) run_one(i);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

namespace {

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string write_results(const std::vector<BenchRow>& rows, std::string_view format) {
  if (format != "csv") throw Error(ErrorCode::kValidation, "unsupported results format '" + std::string(format) + "'");
  if (rows.empty()) throw Error(ErrorCode::kValidation, "no benchmark rows to write");
  std::vector<std::string> params;
  for (const auto& row : rows) {
    for (const auto& [path, value] : row.assignment) {
      if (std::find(params.begin(), params.end(), path) == params.end()) params.push_back(path);
    }
  }
  std::string out = "planner,query,repetition";
  for (const auto& p : params) out += ',' + csv_field("param:" + p);
  out += ",success,solve_time,path_length,checks_performed,message\n";
  for (const auto& row : rows) {
    out += csv_field(row.planner) + ',' + csv_field(row.query) + ',' + std::to_string(row.repetition);
    for (const auto& p : params) {
      out += ',';
      for (const auto& [path, value] : row.assignment) {
        if (path == p) out += format_double17(value);
      }
    }
    out += ',' + std::string(row.success ? "1" : "0") + ',' + format_double17(row.solve_time) + ',' +
           format_double17(row.path_length) + ',' + std::to_string(row.checks_performed) + ',' +
           csv_field(row.message) + '\n';
  }
  return out;
}

}  // namespace robosetup
