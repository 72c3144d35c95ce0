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

#include "robosetup/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "robosetup/error.hpp"

namespace robosetup {

Pose Pose::from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
  Pose p;
  p.translation = xyz;
  p.rotation = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
               Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
               Eigen::AngleAxisd(rpy.x(), Vec3::UnitX());
  p.rotation.normalize();
  return p;
}

Pose Pose::from_matrix(const Eigen::Matrix4d& m) {
  Pose p;
  p.translation = m.block<3, 1>(0, 3);
  p.rotation = Eigen::Quaterniond(Eigen::Matrix3d(m.block<3, 3>(0, 0)));
  p.rotation.normalize();
  return p;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = rotation.toRotationMatrix();
  m.block<3, 1>(0, 3) = translation;
  return m;
}

Vec3 Pose::rpy() const {
  const Eigen::Matrix3d r = rotation.toRotationMatrix();
  const double pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
  double roll = 0.0;
  double yaw = 0.0;
  if (std::abs(std::cos(pitch)) > 1e-12) {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // gimbal lock: fold everything into yaw
    yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return {roll, pitch, yaw};
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.translation = rotation * rhs.translation + translation;
  out.rotation = rotation * rhs.rotation;
  out.rotation.normalize();
  return out;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation = rotation.conjugate();
  out.translation = -(out.rotation * translation);
  return out;
}

std::string shape_type_name(const Shape& shape) {
  struct Visitor {
    std::string operator()(const Sphere&) const { return "sphere"; }
    std::string operator()(const Box&) const { return "box"; }
    std::string operator()(const Cylinder&) const { return "cylinder"; }
    std::string operator()(const ConvexMesh&) const { return "mesh"; }
  };
  return std::visit(Visitor{}, shape);
}

void check_shape(const Shape& shape) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    if (!positive(s->radius)) throw Error(ErrorCode::kValidation, "sphere radius must be positive");
  } else if (const auto* b = std::get_if<Box>(&shape)) {
    for (int i = 0; i < 3; ++i) {
      if (!positive(b->half_extents[i])) {
        throw Error(ErrorCode::kValidation, "box size must be positive");
      }
    }
  } else if (const auto* c = std::get_if<Cylinder>(&shape)) {
    if (!positive(c->radius) || !positive(c->length)) {
      throw Error(ErrorCode::kValidation, "cylinder radius and length must be positive");
    }
  } else if (const auto* m = std::get_if<ConvexMesh>(&shape)) {
    if (m->vertices.size() < 4 || m->faces.size() < 4) {
      throw Error(ErrorCode::kValidation, "convex mesh needs at least 4 non-coplanar vertices");
    }
  }
}

namespace {

struct Face {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;  // normal . x = offset on the plane
};

Face make_face(const std::vector<Vec3>& pts, int a, int b, int c) {
  Face f{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]), 0.0};
  f.normal.normalize();
  f.offset = f.normal.dot(pts[a]);
  return f;
}

}  // namespace

ConvexMesh convex_hull(std::span<const Vec3> points) {
  const std::vector<Vec3> pts(points.begin(), points.end());
  if (pts.size() < 4) {
    throw Error(ErrorCode::kValidation, "convex hull needs at least 4 points");
  }
  Vec3 lo = pts[0];
  Vec3 hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).norm(), 1e-300);
  const double eps = 1e-10 * scale;

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  int i1 = -1;
  double best = 0.0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) { best = d; i1 = i; }
  }
  if (i1 < 0 || best <= eps) throw Error(ErrorCode::kValidation, "mesh vertices are degenerate");
  int i2 = -1;
  best = 0.0;
  const Vec3 dir01 = (pts[i1] - pts[i0]).normalized();
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d = (pts[i] - pts[i0]).cross(dir01).norm();
    if (d > best) { best = d; i2 = i; }
  }
  if (i2 < 0 || best <= eps) throw Error(ErrorCode::kValidation, "mesh vertices are collinear");
  int i3 = -1;
  best = 0.0;
  const Vec3 n012 = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d = std::abs(n012.dot(pts[i] - pts[i0]));
    if (d > best) { best = d; i3 = i; }
  }
  if (i3 < 0 || best <= eps) throw Error(ErrorCode::kValidation, "mesh vertices are coplanar");

  const Vec3 interior = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  std::vector<Face> faces;
  auto add_oriented = [&](int a, int b, int c) {
    Face f = make_face(pts, a, b, c);
    if (f.normal.dot(interior) - f.offset > 0.0) f = make_face(pts, a, c, b);
    faces.push_back(f);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].normal.dot(pts[p]) - faces[f].offset > eps) {
        visible[f] = true;
        any = true;
      }
    }
    if (!any) continue;
    std::set<std::pair<int, int>> visible_edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) visible_edges.emplace(v[k], v[(k + 1) % 3]);
    }
    std::vector<Face> next;
    next.reserve(faces.size() + 8);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) next.push_back(faces[f]);
    }
    for (const auto& [a, b] : visible_edges) {
      if (visible_edges.count({b, a}) == 0) next.push_back(make_face(pts, a, b, p));
    }
    faces = std::move(next);
  }

  ConvexMesh mesh;
  std::map<int, int> remap;
  for (const auto& f : faces) {
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = remap.emplace(f.v[k], static_cast<int>(remap.size()));
      tri[k] = it->second;
    }
    mesh.faces.push_back(tri);
  }
  mesh.vertices.resize(remap.size());
  for (const auto& [orig, idx] : remap) mesh.vertices[idx] = pts[orig];
  return mesh;
}

std::vector<Vec3> load_mesh_vertices(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mesh file " + file.string(), file.string());
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  std::vector<Vec3> out;
  if (ext == ".stl") {
    std::string token;
    while (in >> token) {
      if (token == "vertex") {
        Vec3 v;
        if (!(in >> v.x() >> v.y() >> v.z())) {
          throw Error(ErrorCode::kParse, "bad vertex line in " + file.string(), file.string());
        }
        out.push_back(v);
      }
    }
    if (out.empty()) {
      throw Error(ErrorCode::kParse, "no ASCII STL vertices in " + file.string(), file.string());
    }
  } else if (ext == ".off") {
    std::string header;
    std::size_t nv = 0, nf = 0, ne = 0;
    if (!(in >> header) || header != "OFF" || !(in >> nv >> nf >> ne)) {
      throw Error(ErrorCode::kParse, "bad OFF header in " + file.string(), file.string());
    }
    out.resize(nv);
    for (auto& v : out) {
      if (!(in >> v.x() >> v.y() >> v.z())) {
        throw Error(ErrorCode::kParse, "truncated OFF vertex list in " + file.string(), file.string());
      }
    }
  } else {
    throw Error(ErrorCode::kParse, "unsupported mesh format " + ext, file.string());
  }
  return out;
}

TriangleMesh triangulate(const Shape& shape, int segments) {
  TriangleMesh m;
  segments = std::max(segments, 4);
  const double pi = std::numbers::pi;
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    const int rings = segments / 2;
    for (int i = 0; i <= rings; ++i) {
      const double theta = pi * i / rings;
      for (int j = 0; j < segments; ++j) {
        const double phi = 2.0 * pi * j / segments;
        m.vertices.emplace_back(s->radius * std::sin(theta) * std::cos(phi),
                                s->radius * std::sin(theta) * std::sin(phi),
                                s->radius * std::cos(theta));
      }
    }
    for (int i = 0; i < rings; ++i) {
      for (int j = 0; j < segments; ++j) {
        const int a = i * segments + j;
        const int b = i * segments + (j + 1) % segments;
        const int c = a + segments;
        const int d = b + segments;
        m.triangles.push_back({a, c, b});
        m.triangles.push_back({b, c, d});
      }
    }
  } else if (const auto* b = std::get_if<Box>(&shape)) {
    const Vec3& h = b->half_extents;
    for (int i = 0; i < 8; ++i) {
      m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                              (i & 4) ? h.z() : -h.z());
    }
    m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                   {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  } else if (const auto* c = std::get_if<Cylinder>(&shape)) {
    const double hz = c->length / 2.0;
    for (int j = 0; j < segments; ++j) {
      const double phi = 2.0 * pi * j / segments;
      m.vertices.emplace_back(c->radius * std::cos(phi), c->radius * std::sin(phi), -hz);
      m.vertices.emplace_back(c->radius * std::cos(phi), c->radius * std::sin(phi), hz);
    }
    const int bottom = static_cast<int>(m.vertices.size());
    m.vertices.emplace_back(0.0, 0.0, -hz);
    m.vertices.emplace_back(0.0, 0.0, hz);
    for (int j = 0; j < segments; ++j) {
      const int a = 2 * j;
      const int b = 2 * ((j + 1) % segments);
      m.triangles.push_back({a, b, a + 1});
      m.triangles.push_back({b, b + 1, a + 1});
      m.triangles.push_back({bottom, b, a});
      m.triangles.push_back({bottom + 1, a + 1, b + 1});
    }
  } else if (const auto* mesh = std::get_if<ConvexMesh>(&shape)) {
    m.vertices = mesh->vertices;
    m.triangles = mesh->faces;
  }
  return m;
}

}  // namespace robosetup
