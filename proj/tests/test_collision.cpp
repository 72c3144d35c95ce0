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

#include "oracles.hpp"
#include "robosetup/acm_gen.hpp"
#include "robosetup/collision.hpp"
#include "robosetup/error.hpp"
#include "robosetup/srdf.hpp"
#include "support.hpp"

using namespace robosetup;
namespace ts = testing_support;

namespace {

Pose at(double x, double y = 0.0, double z = 0.0) { return Pose::from_xyz_rpy(Vec3(x, y, z), Vec3::Zero()); }

Pose random_pose(Rng& rng, double spread) {
  return Pose::from_xyz_rpy(Vec3(rng.uniform(-spread, spread), rng.uniform(-spread, spread), rng.uniform(-spread, spread)),
                            Vec3(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-3, 3)));
}

ConvexMesh random_hull(Rng& rng) {
  std::vector<Vec3> pts;
  const int n = 6 + static_cast<int>(rng.uniform(0, 10));
  const Vec3 scale(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8));
  for (int i = 0; i < n; ++i) {
    pts.emplace_back(rng.uniform(-1, 1) * scale.x(), rng.uniform(-1, 1) * scale.y(), rng.uniform(-1, 1) * scale.z());
  }
  return convex_hull(pts);
}

std::vector<Vec3> world_vertices(const ConvexMesh& m, const Pose& p) {
  std::vector<Vec3> out;
  for (const auto& v : m.vertices) out.push_back(p * v);
  return out;
}

}  // namespace

TEST_CASE("primitive closed forms") {
  CHECK(shapes_intersect(Sphere{1.0}, at(0), Sphere{1.0}, at(1.9)));
  CHECK_FALSE(shapes_intersect(Sphere{1.0}, at(0), Sphere{1.0}, at(2.1)));
  const Box unit{Vec3(1, 1, 1)};
  CHECK(shapes_intersect(unit, at(0), unit, at(1.99)));
  CHECK_FALSE(shapes_intersect(unit, at(0), unit, at(2.01)));
  // box rotated 45 degrees about z reaches sqrt(2) along x
  const Pose turned = Pose::from_xyz_rpy(Vec3(2.3, 0, 0), Vec3(0, 0, 0.785398163397448));
  CHECK(shapes_intersect(unit, at(0), unit, turned));
  CHECK_FALSE(shapes_intersect(unit, at(0), unit, Pose::from_xyz_rpy(Vec3(2.5, 0, 0), Vec3(0, 0, 0.785398163397448))));
}

TEST_CASE("sphere and box tests agree with the closed-form oracle and are symmetric") {
  Rng rng(41);
  int agree = 0;
  for (int i = 0; i < 2000; ++i) {
    const Shape a = rng.uniform01() < 0.5 ? Shape{Sphere{rng.uniform(0.1, 0.6)}}
                                          : Shape{Box{Vec3(rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6))}};
    const Shape b = rng.uniform01() < 0.5 ? Shape{Sphere{rng.uniform(0.1, 0.6)}}
                                          : Shape{Box{Vec3(rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6))}};
    const Pose pa = random_pose(rng, 0.7), pb = random_pose(rng, 0.7);
    const bool got = shapes_intersect(a, pa, b, pb);
    CHECK(got == shapes_intersect(b, pb, a, pa));
    agree += got == oracle::primitives_intersect(a, pa.matrix(), b, pb.matrix()) ? 1 : 0;
  }
  CHECK(agree == 2000);
}

TEST_CASE("convex meshes agree with the separating-axis oracle outside a 1e-6 band") {
  Rng rng(8);
  int decided = 0, agree = 0, hits = 0;
  for (int i = 0; i < 200; ++i) {
    const ConvexMesh a = random_hull(rng), b = random_hull(rng);
    const Pose pa = random_pose(rng, 0.1);
    const Pose pb = random_pose(rng, 0.9);
    const double margin = oracle::convex_sat_margin(world_vertices(a, pa), a.faces, world_vertices(b, pb), b.faces);
    if (std::abs(margin) <= 1e-6) continue;
    ++decided;
    const bool got = shapes_intersect(a, pa, b, pb);
    hits += got ? 1 : 0;
    agree += got == (margin < 0) ? 1 : 0;
    CHECK(got == shapes_intersect(b, pb, a, pa));
    // an axis gap never exceeds the true distance
    if (margin > 0) CHECK(shape_distance(a, pa, b, pb) >= margin - 1e-6);
  }
  CHECK(decided >= 190);
  CHECK(agree == decided);
  CHECK(hits > 20);              // both outcomes are exercised
  CHECK(hits < decided - 20);
}

TEST_CASE("cylinders are treated as their bounding capsule") {
  const Cylinder c{0.5, 2.0};
  // just beyond the flat cap, inside the hemispherical cap of the capsule
  CHECK(shapes_intersect(c, at(0), Sphere{0.05}, at(0, 0, 1.3)));
  CHECK_FALSE(shapes_intersect(c, at(0), Sphere{0.05}, at(0, 0, 1.6)));
  CHECK(shapes_intersect(c, at(0), Sphere{0.1}, at(0.55, 0, 0)));
  CHECK(shape_distance(c, at(0), Sphere{0.1}, at(1.0, 0, 0)) == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("allowed collision matrix keys are unordered") {
  AllowedCollisionMatrix acm;
  acm.set("b", "a", AcmEntry{true, AcmReason::kAdjacent, std::nullopt});
  CHECK(acm.is_disabled("a", "b"));
  CHECK(acm.is_disabled("b", "a"));
  CHECK(acm.entries().begin()->first == LinkPair{"a", "b"});
  CHECK_FALSE(acm.is_disabled("a", "c"));
  acm.erase("a", "b");
  CHECK(acm.empty());
  for (auto r : {AcmReason::kAdjacent, AcmReason::kNever, AcmReason::kAlways, AcmReason::kDefault, AcmReason::kUser}) {
    CHECK(acm_reason_from_string(to_string(r)) == r);
  }
}

TEST_CASE("check_state on the sample arm") {
  const auto m = ts::model("sample_arm.urdf");
  const SemanticModel sem = ts::semantic(*m, "sample_arm.srdf");
  const RobotState zero = default_state(*m);

  SUBCASE("zero state with its ACM is free") {
    CHECK_FALSE(check_state(*m, zero, sem.disabled, {}).in_collision);
  }
  SUBCASE("obstacle over the forearm") {
    const Pose forearm = forward_kinematics(*m, zero).at("forearm_link");
    const auto& geom = m->link("forearm_link").collision.at(0);
    const Vec3 centre = (forearm * geom.origin).translation;
    PlanningSceneWorld world;
    world.upsert({"obstacle", Box{Vec3(0.05, 0.05, 0.05)}, centre, Vec3::Zero()});
    const CollisionResult r = check_state(*m, zero, sem.disabled, world);
    REQUIRE(r.in_collision);
    bool named = false;
    for (const auto& c : r.contacts) {
      named |= c.kind == ContactKind::kWorld && c.first == "forearm_link" && c.second == "obstacle";
    }
    CHECK(named);
  }
  SUBCASE("full checks count every enabled pair") {
    const CollisionContext ctx(*m, sem.disabled, PlanningSceneWorld{});
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
      const CollisionResult r = ctx.check(ts::random_state(*m, rng));
      CHECK(r.checks_performed == ctx.enabled_pair_count());
      CHECK(r.in_collision == !r.contacts.empty());
      CHECK(r.checks_performed >= r.contacts.size());
    }
    CHECK(ctx.enabled_pair_count() == 21 - sem.disabled.disabled_count());
  }
}

TEST_CASE("generated ACM keeps verdicts and removes checks") {
  const auto m = ts::model("sample_arm.urdf");
  AcmGenParams p;
  p.rng_seed = 7;
  const AcmReport report = generate_acm(*m, p);
  const CollisionContext with(*m, report.acm, PlanningSceneWorld{});
  const CollisionContext without(*m, AllowedCollisionMatrix{}, PlanningSceneWorld{});
  Rng rng(1234);
  std::size_t a = 0, b = 0;
  for (int i = 0; i < 300; ++i) {
    const RobotState s = ts::random_state(*m, rng);
    const auto rw = with.check(s, CollisionFlags{.boolean_only = false, .self = true, .world = true});
    const auto ro = without.check(s, CollisionFlags{.boolean_only = false, .self = true, .world = true});
    // Adjacent and Always pairs are expected to touch; compare the rest.
    bool other = false;
    for (const auto& c : ro.contacts) {
      const AcmEntry* e = report.acm.find(c.first, c.second);
      other |= e == nullptr || e->reason == AcmReason::kNever;
    }
    CHECK(rw.in_collision == other);
    a += rw.checks_performed;
    b += ro.checks_performed;
  }
  CHECK(a < b);
}

TEST_CASE("motion validation") {
  const auto m = ts::model("planar_2link.urdf");
  const SemanticModel sem = ts::semantic(*m, "planar_2link.srdf");
  const JointGroup g = resolve_group(*m, sem, "arm");
  const RobotState from{{{"j1", -0.5}, {"j2", 0.0}}};
  const RobotState to{{{"j1", 0.5}, {"j2", 0.0}}};

  SUBCASE("empty world") { CHECK(validate_motion(*m, g, from, to, sem.disabled, {}, 0.01).valid); }

  SUBCASE("box straddling the midpoint") {
    PlanningSceneWorld world;
    world.upsert({"block", Box{Vec3(0.05, 0.05, 0.05)}, Vec3(1.5, 0, 0), Vec3::Zero()});
    // dense sweep oracle: only a band around t = 0.5 collides
    const auto bounds = group_bounds(*m, g);
    int first = -1, last = -1;
    for (int k = 0; k <= 10000; ++k) {
      const RobotState s = interpolate(bounds, from, to, k / 10000.0);
      if (check_state(*m, s, sem.disabled, world).in_collision) {
        if (first < 0) first = k;
        last = k;
      }
    }
    REQUIRE(first > 0);
    CHECK(first < 5000);
    CHECK(last > 5000);
    CHECK(last < 10000);
    const MotionCheck mc = validate_motion(*m, g, from, to, sem.disabled, world, 0.01);
    CHECK_FALSE(mc.valid);
    REQUIRE(mc.first_invalid_t);
    CHECK(*mc.first_invalid_t == 0.5);
  }

  SUBCASE("fine validity implies coarse validity") {
    PlanningSceneWorld world;
    world.upsert({"post", Sphere{0.15}, Vec3(1.4, 0.6, 0), Vec3::Zero()});
    Rng rng(77);
    const auto bounds = group_bounds(*m, g);
    int valid_fine = 0;
    for (int i = 0; i < 200; ++i) {
      const RobotState a = sample_random_state(*m, g, rng), b = sample_random_state(*m, g, rng);
      const bool fine = validate_motion(*m, g, a, b, sem.disabled, world, 0.005).valid;
      if (!fine) continue;
      ++valid_fine;
      for (double coarse : {0.01, 0.05, 0.2}) CHECK(validate_motion(*m, g, a, b, sem.disabled, world, coarse).valid);
    }
    CHECK(valid_fine > 10);
  }

  SUBCASE("bisection schedules nest") {
    for (double d : {0.3, 1.0, 4.7}) {
      const auto fine = bisection_levels(d, 0.01);
      const auto coarse = bisection_levels(d, 0.08);
      REQUIRE(coarse.size() <= fine.size());
      for (std::size_t i = 0; i < coarse.size(); ++i) CHECK(coarse[i] == fine[i]);
    }
  }

  SUBCASE("resolution fraction bounds") {
    CHECK_THROWS_AS(validate_motion(*m, g, from, to, sem.disabled, {}, 0.0), Error);
    CHECK_THROWS_AS(validate_motion(*m, g, from, to, sem.disabled, {}, 1.0), Error);
  }
}

TEST_CASE("world object names are unique") {
  PlanningSceneWorld w;
  w.upsert({"a", Sphere{0.1}, Vec3::Zero(), Vec3::Zero()});
  w.upsert({"a", Sphere{0.2}, Vec3::Zero(), Vec3::Zero()});
  CHECK(w.objects.size() == 1);
  CHECK(std::get<Sphere>(w.find("a")->shape).radius == 0.2);
  w.objects.push_back(w.objects.front());
  CHECK_THROWS_AS(w.check(), Error);
  CHECK(w.remove("a"));
}
