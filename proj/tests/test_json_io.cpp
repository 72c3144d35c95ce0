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

#include <algorithm>
#include <cmath>
#include <limits>

#include "robosetup/error.hpp"
#include "robosetup/json_io.hpp"
#include "support.hpp"

using namespace robosetup;
namespace ts = testing_support;

namespace {

// Awkward doubles: subnormals, extremes, values with long expansions.
double awkward(Rng& rng) {
  switch (static_cast<int>(rng.uniform(0, 6))) {
    case 0: return rng.uniform(-1, 1) * std::numeric_limits<double>::denorm_min() * 17;
    case 1: return rng.uniform(-1, 1) * 1e300;
    case 2: return 0.1 * rng.uniform(-10, 10);
    case 3: return std::nextafter(rng.uniform(-4, 4), 0.0);
    case 4: return -0.0;
    default: return rng.uniform(-3.2, 3.2);
  }
}

bool same_bits(double a, double b) { return std::signbit(a) == std::signbit(b) && (a == b); }

bool same_shape(const Shape& a, const Shape& b) {
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<Sphere>(&a)) return s->radius == std::get<Sphere>(b).radius;
  if (const auto* x = std::get_if<Box>(&a)) return x->half_extents == std::get<Box>(b).half_extents;
  if (const auto* c = std::get_if<Cylinder>(&a)) {
    return c->radius == std::get<Cylinder>(b).radius && c->length == std::get<Cylinder>(b).length;
  }
  const auto& ma = std::get<ConvexMesh>(a);
  const auto& mb = std::get<ConvexMesh>(b);
  // faces are derived; compare them as sets of rotated triangles
  auto canonical = [](const ConvexMesh& m) {
    std::vector<std::array<int, 3>> out;
    for (auto f : m.faces) {
      std::rotate(f.begin(), std::min_element(f.begin(), f.end()), f.end());
      out.push_back(f);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return ma.vertices == mb.vertices && canonical(ma) == canonical(mb);
}

}  // namespace

TEST_CASE("state JSON round trips exactly") {
  Rng rng(606);
  for (int i = 0; i < 500; ++i) {
    RobotState s;
    const int n = static_cast<int>(rng.uniform(0, 8));
    for (int k = 0; k < n; ++k) s.values["joint_" + std::to_string(k)] = awkward(rng);
    const RobotState back = state_from_json(Json::parse(state_to_json(s).dump()));
    REQUIRE(back.values.size() == s.values.size());
    for (const auto& [k, v] : s.values) CHECK(same_bits(back.at(k), v));
  }
  const auto m = ts::model("sample_arm.urdf");
  Rng arm(3);
  for (int i = 0; i < 100; ++i) {
    const RobotState s = ts::random_state(*m, arm);
    CHECK(state_from_json(Json::parse(state_to_json(s).dump())) == s);
  }
}

TEST_CASE("malformed states are rejected") {
  CHECK_THROWS_AS(state_from_json(Json::parse(R"({"a": "x"})")), Error);
  CHECK_THROWS_AS(state_from_json(Json::parse("[1, 2]")), Error);
}

TEST_CASE("shapes round trip exactly") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    Shape s;
    switch (i % 4) {
      case 0: s = Sphere{rng.uniform(1e-6, 5)}; break;
      case 1: s = Box{Vec3(rng.uniform(1e-3, 2), rng.uniform(1e-3, 2), rng.uniform(1e-3, 2))}; break;
      case 2: s = Cylinder{rng.uniform(1e-3, 1), rng.uniform(1e-3, 3)}; break;
      default: {
        std::vector<Vec3> pts;
        for (int k = 0; k < 12; ++k) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        s = convex_hull(pts);
      }
    }
    CAPTURE(i);
    const Shape back = shape_from_json(Json::parse(shape_to_json(s).dump()));
    CHECK(same_shape(back, s));
    CHECK(shape_to_json(back).dump() == shape_to_json(s).dump());
  }
  CHECK_THROWS_AS(shape_from_json(Json::parse(R"({"type": "torus"})")), Error);
  CHECK_THROWS_AS(shape_from_json(Json::parse(R"({"type": "sphere", "radius": -1})")), Error);
}

TEST_CASE("poses: quaternion form is exact, rpy form is accepted") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose p = Pose::from_xyz_rpy(Vec3(awkward(rng), rng.uniform(-2, 2), rng.uniform(-2, 2)),
                                      Vec3(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-3, 3)));
    Json j = Json::parse(pose_to_json(p).dump());
    const Pose back = pose_from_json(j);
    CHECK(back.translation == p.translation);
    CHECK((back.rotation.coeffs() - p.rotation.coeffs()).norm() == 0.0);
    j.erase("quat");
    CHECK((pose_from_json(j).matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("scene files round trip exactly") {
  const PlanningSceneWorld fixture = world_from_json(Json::parse(read_text_file(ts::data("planar_scene.json"))));
  REQUIRE(fixture.objects.size() == 1);
  CHECK(fixture.objects[0].name == "post");
  CHECK(std::get<Box>(fixture.objects[0].shape).half_extents == Vec3(0.15, 0.15, 0.15));

  Rng rng(44);
  for (int i = 0; i < 100; ++i) {
    PlanningSceneWorld w;
    const int n = static_cast<int>(rng.uniform(0, 6));
    for (int k = 0; k < n; ++k) {
      Shape s = k % 2 == 0 ? Shape(Sphere{rng.uniform(0.01, 1)}) : Shape(Box{Vec3(0.1, rng.uniform(0.01, 1), 0.3)});
      w.upsert({"obj" + std::to_string(k), s, Vec3(awkward(rng), awkward(rng), rng.uniform(-1, 1)),
                Vec3(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-3, 3))});
    }
    const Json text = world_to_json(w);
    const PlanningSceneWorld back = world_from_json(Json::parse(text.dump()));
    REQUIRE(back.objects.size() == w.objects.size());
    for (std::size_t k = 0; k < w.objects.size(); ++k) {
      CHECK(back.objects[k].name == w.objects[k].name);
      CHECK(same_shape(back.objects[k].shape, w.objects[k].shape));
      CHECK(back.objects[k].xyz == w.objects[k].xyz);
      CHECK(back.objects[k].rpy == w.objects[k].rpy);
    }
    CHECK(world_to_json(back).dump() == text.dump());
  }
  CHECK_THROWS_AS(world_from_json(Json::parse(R"({"objects": [
      {"name": "a", "shape": {"type": "sphere", "radius": 1}, "pose": {"xyz": [0, 0, 0]}},
      {"name": "a", "shape": {"type": "sphere", "radius": 1}, "pose": {"xyz": [1, 0, 0]}}]})")),
                  Error);
}
