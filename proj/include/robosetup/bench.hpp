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
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robosetup/planning.hpp"

namespace robosetup {

/// One swept parameter. Paths: "planner.<name>", "resolution_fraction",
/// "time_budget" or "goal_tolerance".
struct SweepSpec {
  std::string parameter;
  double lower = 0.0;
  double upper = 0.0;
  double increment = 1.0;

  void check() const;
};

using ParameterAssignment = std::vector<std::pair<std::string, double>>;

/// lower, lower + inc, ... up to upper; upper itself counts when within
/// 1e-9 * inc. Count is floor((upper - lower) / inc + 1e-9) + 1.
std::vector<double> sweep_values(const SweepSpec& spec);

/// Cartesian product in declaration order, last spec varying fastest. No
/// specs gives one empty assignment.
std::vector<ParameterAssignment> expand_sweep(const std::vector<SweepSpec>& specs);

struct BenchQuery {
  std::string id;
  std::string group;
  RobotState start;
  RobotState goal;
};

struct BenchPlanner {
  std::string id;
  std::string type = "rrt";
  bool use_acm = true;
  std::map<std::string, double> params;
};

struct BenchConfig {
  std::shared_ptr<const RobotModel> model;
  std::shared_ptr<const SemanticModel> semantic;
  PlanningSceneWorld world;
  std::vector<BenchQuery> queries;
  std::vector<BenchPlanner> planners;
  std::vector<SweepSpec> sweeps;
  int repetitions = 1;
  double time_budget = 5.0;
  double resolution_fraction = 0.01;
  double goal_tolerance = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency

  void check() const;
};

/// Parses benchmark.conf text; model, SRDF and world paths resolve against
/// `base_dir`.
BenchConfig parse_bench_config(std::string_view text, const std::filesystem::path& base_dir);
BenchConfig load_bench_config(const std::filesystem::path& file);

/// State spec used in benchmark files: "default", a group state name, or
/// "joint=value joint=value ...".
RobotState parse_state_spec(std::string_view spec, const RobotModel& model, const SemanticModel* semantic,
                            const std::string& group);

struct BenchRow {
  std::string planner;
  ParameterAssignment assignment;
  std::string query;
  int repetition = 0;
  bool success = false;
  double solve_time = 0.0;
  double path_length = 0.0;
  std::size_t checks_performed = 0;
  std::string message;
};

/// Runs planners x cells x queries x repetitions. Run k of a (cell, query)
/// uses seed derive_seed(config.seed, index) with the same index for every
/// planner, so planners are compared on identical random streams. Rows come
/// back in (planner, cell, query, repetition) order whatever the thread
/// count; failures and errors become unsuccessful rows.
std::vector<BenchRow> run_benchmark(const BenchConfig& config,
                                    const PluginRegistry& registry = PluginRegistry::global());

/// CSV: planner,query,repetition,param:<path>...,success,solve_time,
/// path_length,checks_performed,message. Doubles use 17 significant digits.
std::string write_results(const std::vector<BenchRow>& rows, std::string_view format = "csv");

}  // namespace robosetup
