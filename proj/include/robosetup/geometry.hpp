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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Geometry>

namespace robosetup {

using Vec3 = Eigen::Vector3d;

/// Rigid transform: translation in meters plus a unit quaternion.
struct Pose {
  Vec3 translation = Vec3::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  static Pose identity() { return {}; }
  /// Roll-pitch-yaw about fixed X, Y, Z axes (R = Rz(yaw) * Ry(pitch) * Rx(roll)).
  static Pose from_xyz_rpy(const Vec3& xyz, const Vec3& rpy);
  static Pose from_matrix(const Eigen::Matrix4d& m);

  Eigen::Matrix4d matrix() const;
  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }
  Vec3 rpy() const;

  Pose operator*(const Pose& rhs) const;
  Vec3 operator*(const Vec3& point) const { return rotation * point + translation; }
  Pose inverse() const;
};

struct Sphere {
  double radius = 0.0;
};

struct Box {
  Vec3 half_extents = Vec3::Zero();
};

/// Cylinder aligned with the local z axis, centered at the origin.
struct Cylinder {
  double radius = 0.0;
  double length = 0.0;
};

/// Convex polytope: hull vertices plus outward-oriented triangular faces.
struct ConvexMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

using Shape = std::variant<Sphere, Box, Cylinder, ConvexMesh>;

std::string shape_type_name(const Shape& shape);

/// Throws Error(kValidation) when a dimension is not strictly positive or a
/// mesh is degenerate.
void check_shape(const Shape& shape);

/// Convex hull of a point cloud. Requires at least four non-coplanar points.
ConvexMesh convex_hull(std::span<const Vec3> points);

/// Vertex list from an ASCII STL or OFF file (chosen by extension).
std::vector<Vec3> load_mesh_vertices(const std::filesystem::path& file);

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Triangulated surface of a shape in its local frame, for rendering.
TriangleMesh triangulate(const Shape& shape, int segments = 16);

}  // namespace robosetup
