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

#include "robosetup/json_io.hpp"

#include <algorithm>
#include <cmath>

#include "robosetup/error.hpp"

namespace robosetup {

namespace {

Vec3 vec3_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kParse, std::string(what) + " must be a 3-element array", what);
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json vec3_to(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Json state_to_json(const RobotState& state) {
  Json out = Json::object();
  for (const auto& [k, v] : state.values) out[k] = v;
  return out;
}

RobotState state_from_json(const Json& json) {
  if (!json.is_object()) throw Error(ErrorCode::kParse, "robot state must be a JSON object");
  RobotState s;
  for (const auto& [k, v] : json.items()) {
    if (!v.is_number()) throw Error(ErrorCode::kParse, "state value for '" + k + "' is not a number", k);
    s.values[k] = v.get<double>();
  }
  return s;
}

Json pose_to_json(const Pose& pose) {
  const auto& q = pose.rotation;
  return Json{{"xyz", vec3_to(pose.translation)},
              {"quat", Json::array({q.x(), q.y(), q.z(), q.w()})},
              {"rpy", vec3_to(pose.rpy())}};
}

Pose pose_from_json(const Json& json) {
  if (!json.is_object()) throw Error(ErrorCode::kParse, "pose must be a JSON object");
  const Vec3 xyz = json.contains("xyz") ? vec3_from(json["xyz"], "xyz") : Vec3::Zero();
  if (json.contains("quat")) {
    const auto& q = json["quat"];
    if (!q.is_array() || q.size() != 4) throw Error(ErrorCode::kParse, "quat must be [x, y, z, w]", "quat");
    Pose p;
    p.translation = xyz;
    p.rotation = Eigen::Quaterniond(q[3].get<double>(), q[0].get<double>(), q[1].get<double>(), q[2].get<double>());
    const double norm = p.rotation.norm();
    if (norm < 1e-12) throw Error(ErrorCode::kParse, "quat has zero norm", "quat");
    // already unit up to rounding: keep the bits so poses round trip
    if (std::abs(norm - 1.0) > 1e-14) p.rotation.normalize();
    return p;
  }
  const Vec3 rpy = json.contains("rpy") ? vec3_from(json["rpy"], "rpy") : Vec3::Zero();
  return Pose::from_xyz_rpy(xyz, rpy);
}

Json shape_to_json(const Shape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return Json{{"type", "sphere"}, {"radius", s->radius}};
  if (const auto* b = std::get_if<Box>(&shape)) return Json{{"type", "box"}, {"size", vec3_to(b->half_extents * 2.0)}};
  if (const auto* c = std::get_if<Cylinder>(&shape)) {
    return Json{{"type", "cylinder"}, {"radius", c->radius}, {"length", c->length}};
  }
  const auto& m = std::get<ConvexMesh>(shape);
  Json verts = Json::array();
  for (const auto& v : m.vertices) verts.push_back(vec3_to(v));
  return Json{{"type", "mesh"}, {"vertices", verts}};
}

Shape shape_from_json(const Json& json) {
  const std::string type = json.value("type", "");
  Shape shape;
  if (type == "sphere") {
    shape = Sphere{json.at("radius").get<double>()};
  } else if (type == "box") {
    shape = Box{vec3_from(json.at("size"), "size") / 2.0};
  } else if (type == "cylinder") {
    shape = Cylinder{json.at("radius").get<double>(), json.at("length").get<double>()};
  } else if (type == "mesh") {
    std::vector<Vec3> verts;
    for (const auto& v : json.at("vertices")) verts.push_back(vec3_from(v, "vertices"));
    ConvexMesh hull = convex_hull(verts);
    // Keep the caller's vertex order when every point is a hull vertex, so
    // emitted meshes read back unchanged.
    if (hull.vertices.size() == verts.size()) {
      std::vector<int> remap(hull.vertices.size(), -1);
      for (std::size_t h = 0; h < hull.vertices.size(); ++h) {
        for (std::size_t i = 0; i < verts.size(); ++i) {
          if (verts[i] == hull.vertices[h]) remap[h] = static_cast<int>(i);
        }
      }
      if (std::find(remap.begin(), remap.end(), -1) == remap.end()) {
        for (auto& f : hull.faces) {
          for (int& v : f) v = remap[static_cast<std::size_t>(v)];
        }
        hull.vertices = verts;
      }
    }
    shape = std::move(hull);
  } else {
    throw Error(ErrorCode::kParse, "unknown shape type '" + type + "'", "type");
  }
  check_shape(shape);
  return shape;
}

Json world_to_json(const PlanningSceneWorld& world) {
  Json objects = Json::array();
  for (const auto& o : world.objects) {
    objects.push_back(Json{{"name", o.name},
                           {"shape", shape_to_json(o.shape)},
                           {"pose", Json{{"xyz", vec3_to(o.xyz)}, {"rpy", vec3_to(o.rpy)}}}});
  }
  return Json{{"objects", objects}};
}

PlanningSceneWorld world_from_json(const Json& json) {
  if (!json.is_object() || !json.contains("objects") || !json["objects"].is_array()) {
    throw Error(ErrorCode::kParse, "scene must be an object with an 'objects' array", "objects");
  }
  PlanningSceneWorld world;
  try {
    for (const auto& o : json["objects"]) {
      WorldObject obj;
      obj.name = o.at("name").get<std::string>();
      obj.shape = shape_from_json(o.at("shape"));
      if (o.contains("pose")) {
        const auto& p = o["pose"];
        if (p.contains("xyz")) obj.xyz = vec3_from(p["xyz"], "xyz");
        if (p.contains("rpy")) obj.rpy = vec3_from(p["rpy"], "rpy");
      }
      world.objects.push_back(std::move(obj));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad scene JSON: ") + e.what());
  }
  world.check();
  return world;
}

}  // namespace robosetup
