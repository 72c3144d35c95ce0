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

#include <chrono>
#include <thread>

#include "oracles.hpp"
#include "robosetup/acm_gen.hpp"
#include "robosetup/confgen.hpp"
#include "robosetup/error.hpp"
#include "support.hpp"

using namespace robosetup;
namespace ts = testing_support;

namespace {

std::string reason_of(const AcmReport& r, const LinkPair& p) {
  const AcmEntry* e = r.acm.find(p.first, p.second);
  return e != nullptr && e->disabled ? std::string(to_string(e->reason)) : std::string();
}

AcmReport run(const RobotModel& m, std::uint64_t seed, unsigned threads = 0, std::uint64_t samples = 10000) {
  AcmGenParams p;
  p.rng_seed = seed;
  p.threads = threads;
  p.sample_count = samples;
  return generate_acm(m, p);
}

}  // namespace

TEST_CASE("two-link arm: the only pair is Adjacent") {
  const auto m = ts::model("two_link.urdf");
  const AcmReport r = run(*m, 0);
  REQUIRE(r.pairs.size() == 1);
  CHECK(reason_of(r, {"base_link", "link1"}) == "Adjacent");
  CHECK(r.disabled_by_reason.at(AcmReason::kAdjacent) == 1);
}

TEST_CASE("three-link toy: link1/link3 is Never, matching the grid oracle") {
  const auto m = ts::model("three_link_toy.urdf");
  const AcmReport r = run(*m, 3);
  CHECK(reason_of(r, {"link1", "link3"}) == "Never");
  CHECK(r.acm.find("link1", "link3")->stats->samples == 10000);
  CHECK(reason_of(r, {"link1", "link2"}) == "Adjacent");
  CHECK(reason_of(r, {"link2", "link3"}) == "Adjacent");
}

TEST_CASE("concentric housings are disabled Always with collisions = samples") {
  const auto m = ts::model("always_overlap.urdf");
  const AcmReport r = run(*m, 5, 0, 2000);
  REQUIRE(reason_of(r, {"housing_a", "housing_b"}) == "Always");
  const auto stats = *r.acm.find("housing_a", "housing_b")->stats;
  CHECK(stats.collisions == stats.samples);
  CHECK(stats.samples == 2000);
}

TEST_CASE("classification equals the brute-force grid oracle on every small fixture") {
  for (const char* fixture : {"two_link.urdf", "three_link_toy.urdf", "always_overlap.urdf", "planar_2link.urdf"}) {
    CAPTURE(fixture);
    const auto m = ts::model(fixture);
    const auto expected = oracle::classify(oracle::grid_pair_counts(*m, 181));
    const AcmReport r = run(*m, 11);
    REQUIRE(r.pairs.size() == expected.size());
    for (const auto& [pair, cls] : expected) {
      CAPTURE(pair.first);
      CAPTURE(pair.second);
      CHECK(reason_of(r, pair) == cls);
    }
  }
}

TEST_CASE("frozen oracle results still hold") {
  const Json golden = Json::parse(read_text_file(std::filesystem::path(ROBOSETUP_GOLDEN_DIR) / "acm_grid.json"));
  for (const auto& [fixture, entry] : golden.items()) {
    CAPTURE(fixture);
    const auto m = ts::model(fixture);
    const auto counts = oracle::grid_pair_counts(*m, entry.at("grid_steps").get<int>());
    const auto classes = oracle::classify(counts);
    CHECK(counts.states == entry.at("states").get<std::uint64_t>());
    for (const auto& row : entry.at("pairs")) {
      const LinkPair key{row.at("link1").get<std::string>(), row.at("link2").get<std::string>()};
      CHECK(counts.collisions.at(key) == row.at("collisions").get<std::uint64_t>());
      CHECK(classes.at(key) == row.at("class").get<std::string>());
    }
  }
}

TEST_CASE("report invariants") {
  const auto m = ts::model("sample_arm.urdf");
  const AcmReport r = run(*m, 7);
  CHECK(r.pairs.size() == collidable_pairs(*m).size());
  std::size_t by_reason = 0;
  for (const auto& [reason, n] : r.disabled_by_reason) by_reason += n;
  CHECK(by_reason == r.acm.disabled_count());
  for (const auto& [pair, entry] : r.acm.entries()) {
    if (entry.reason == AcmReason::kNever || entry.reason == AcmReason::kAlways || entry.reason == AcmReason::kDefault) {
      CHECK(entry.stats.has_value());
    }
  }
  // every joint with geometry on both sides is Adjacent
  for (const auto& j : m->joints()) CHECK(reason_of(r, j.parent_link < j.child_link ? LinkPair{j.parent_link, j.child_link}
                                                                                      : LinkPair{j.child_link, j.parent_link}) == "Adjacent");
  CHECK_FALSE(r.caveat.empty());
}

TEST_CASE("an independent run never sees a Never pair collide") {
  const auto m = ts::model("sample_arm.urdf");
  const AcmReport r = run(*m, 7);
  const CollisionContext ctx(*m, AllowedCollisionMatrix{}, PlanningSceneWorld{});
  std::vector<std::size_t> never;
  for (std::size_t i = 0; i < ctx.pairs().size(); ++i) {
    if (reason_of(r, ctx.pairs()[i]) == "Never") never.push_back(i);
  }
  REQUIRE_FALSE(never.empty());
  Rng rng(424242);
  std::size_t violations = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto poses = link_poses(*m, ts::random_state(*m, rng));
    for (std::size_t p : never) violations += ctx.pair_in_collision(poses, p) ? 1 : 0;
  }
  CHECK(violations == 0);
}

TEST_CASE("report JSON is independent of the thread count") {
  const auto m = ts::model("sample_arm.urdf");
  const std::string one = acm_report_to_json(run(*m, 9, 1)).dump();
  CHECK(one == acm_report_to_json(run(*m, 9, 4)).dump());
  CHECK(one == acm_report_to_json(run(*m, 9, 0)).dump());
  CHECK(one != acm_report_to_json(run(*m, 10, 1)).dump());
}

TEST_CASE("disabled entries survive the report JSON") {
  const auto m = ts::model("sample_arm.urdf");
  const AcmReport r = run(*m, 2, 0, 3000);
  CHECK(acm_from_report_json(acm_report_to_json(r)) == r.acm);
  CHECK_FALSE(acm_report_to_json(r).contains("elapsed_seconds"));
  CHECK(acm_report_to_json(r, true).contains("elapsed_seconds"));
}

TEST_CASE("parameter checks") {
  const auto m = ts::model("two_link.urdf");
  AcmGenParams p;
  p.sample_count = 0;
  CHECK_THROWS_AS(generate_acm(*m, p), Error);
  p.sample_count = 10;
  p.always_threshold = 0.0;
  CHECK_THROWS_AS(generate_acm(*m, p), Error);
  const char* unbounded = R"(<robot name="u"><link name="a"/><link name="b"/>
    <joint name="f" type="floating"><parent link="a"/><child link="b"/></joint></robot>)";
  CHECK_THROWS_AS(generate_acm(parse_urdf(unbounded), AcmGenParams{}), Error);
}

TEST_CASE("background jobs report monotone progress") {
  const auto m = ts::model("sample_arm.urdf");
  AcmJobTable table;
  AcmGenParams p;
  p.sample_count = 40000;
  p.rng_seed = 1;
  const std::string id = table.start(m, p);
  CHECK(id == "acm-1");
  std::uint64_t last = 0;
  for (;;) {
    const AcmProgress pr = acm_progress(table, id);
    CHECK(pr.done >= last);
    CHECK(pr.total == 40000);
    last = pr.done;
    if (pr.finished) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  const AcmProgress final_progress = table.progress(id);
  CHECK(final_progress.done == final_progress.total);
  const auto result = table.get(id)->result();
  REQUIRE(result);
  CHECK(acm_report_to_json(*result).dump() == acm_report_to_json(generate_acm(*m, p)).dump());
  CHECK_THROWS_AS(table.progress("acm-99"), Error);
}

TEST_CASE("a cancelled job leaves no result") {
  const auto m = ts::model("sample_arm.urdf");
  AcmGenParams p;
  p.sample_count = 2000000;
  AcmJob job(m, p);
  job.cancel();
  job.wait();
  CHECK(job.progress().cancelled);
  CHECK_FALSE(job.result().has_value());
}
