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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "robosetup/cli.hpp"
#include "robosetup/confgen.hpp"
#include "support.hpp"

using namespace robosetup;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "robosetup");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return fs::absolute(ts::data(name)).string(); }

}  // namespace

TEST_CASE("validate") {
  Run r = cli({"validate", data("sample_arm.urdf"), "--srdf", data("sample_arm.srdf")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("0 errors") != std::string::npos);
  CHECK(cli({"validate", "/nonexistent/robot.urdf"}).code == kExitIo);
  const fs::path dir = ts::scratch_dir("cli_validate");
  write_text_file(dir / "broken.urdf", "<robot name='b'><link name='a'>");
  CHECK(cli({"validate", (dir / "broken.urdf").string()}).code == kExitInvalid);
  fs::remove_all(dir);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitInvalid);
  CHECK(cli({"frobnicate"}).code == kExitInvalid);
  CHECK(cli({"acm"}).code == kExitInvalid);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("acm output is deterministic for a seed, whatever the thread count") {
  const fs::path dir = ts::scratch_dir("cli_acm");
  const std::string urdf = data("sample_arm.urdf");
  REQUIRE(cli({"acm", urdf, "--samples", "10000", "--seed", "7", "-o", (dir / "a.json").string()}).code == 0);
  REQUIRE(cli({"acm", urdf, "--samples", "10000", "--seed", "7", "--threads", "1", "-o", (dir / "b.json").string()})
              .code == 0);
  CHECK(read_text_file(dir / "a.json") == read_text_file(dir / "b.json"));
  const Run stdout_run = cli({"acm", urdf, "--samples", "10000", "--seed", "7"});
  CHECK(stdout_run.out == read_text_file(dir / "a.json"));
  CHECK(cli({"acm", urdf, "--samples", "0"}).code == kExitInvalid);
  fs::remove_all(dir);
}

TEST_CASE("genconfig, plan and bench through one bundle") {
  const fs::path dir = ts::scratch_dir("cli_pipeline");
  const std::string urdf = data("planar_2link.urdf");
  const std::string bundle = (dir / "bundle").string();
  REQUIRE(cli({"genconfig", urdf, "--srdf", data("planar_2link.srdf"), "-o", bundle}).code == 0);
  const std::string first = read_text_file(dir / "bundle/config/planning.conf");
  CHECK(cli({"genconfig", urdf, "--srdf", data("planar_2link.srdf"), "-o", bundle}).code == kExitConflict);
  CHECK(cli({"genconfig", urdf, "--srdf", data("planar_2link.srdf"), "-o", bundle, "--overwrite"}).code == 0);
  CHECK(read_text_file(dir / "bundle/config/planning.conf") == first);

  const std::string world = data("planar_scene.json");
  const std::string start = R"({"j1": -1.0, "j2": 0.5})";
  const Run planned = cli({"plan", bundle, "--world", world, "--start", start, "--goal", R"({"named": "right"})",
                           "--seed", "11", "-o", (dir / "traj.csv").string()});
  REQUIRE(planned.code == 0);
  const std::string csv = read_text_file(dir / "traj.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "t,j1_pos,j1_vel,j1_acc,j2_pos,j2_vel,j2_acc");
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 3);

  CHECK(cli({"plan", bundle, "--goal", R"({"named": "nowhere"})"}).code == kExitNotFound);
  CHECK(cli({"plan", bundle, "--goal", R"({"j1": 9.0, "j2": 0.0})"}).code == kExitInvalid);
  CHECK(cli({"plan", bundle, "--world", world, "--start", start, "--goal", R"({"named": "right"})", "--time-budget",
             "1e-9"})
            .code == kExitPlanFailed);
  CHECK(cli({"plan", (dir / "nothing").string(), "--goal", "{}"}).code == kExitNotFound);

  const Run bench = cli({"bench", (dir / "bundle/config/benchmark.conf").string(), "--threads", "2"});
  REQUIRE(bench.code == 0);
  CHECK(bench.out.rfind("planner,query,repetition,", 0) == 0);
  CHECK(std::count(bench.out.begin(), bench.out.end(), '\n') == 4);  // header + 3 repetitions
  fs::remove_all(dir);
}

TEST_CASE("the installed binary reports the same exit codes") {
  const std::string bin = ROBOSETUP_CLI;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " validate " + data("two_link.urdf")) == kExitOk);
  CHECK(status(bin + " validate /nonexistent.urdf") == kExitIo);
  CHECK(status(bin + " acm") == kExitInvalid);
}
