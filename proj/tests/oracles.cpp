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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using robosetup::Box;
using robosetup::JointKind;
using robosetup::Shape;
using robosetup::Sphere;

Mat4 translation(const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m(0, 3) = t.x();
  m(1, 3) = t.y();
  m(2, 3) = t.z();
  return m;
}

Mat4 rot_x(double a) {
  Mat4 m = Mat4::Identity();
  m(1, 1) = std::cos(a);
  m(1, 2) = -std::sin(a);
  m(2, 1) = std::sin(a);
  m(2, 2) = std::cos(a);
  return m;
}

Mat4 rot_y(double a) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = std::cos(a);
  m(0, 2) = std::sin(a);
  m(2, 0) = -std::sin(a);
  m(2, 2) = std::cos(a);
  return m;
}

Mat4 rot_z(double a) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = std::cos(a);
  m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a);
  m(1, 1) = std::cos(a);
  return m;
}

Mat4 rot_axis(const Vec3& axis, double angle) {
  const Vec3 k = axis / axis.norm();
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  const Mat3 r = Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * kx * kx;
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = r;
  return m;
}

Mat4 from_pose(const robosetup::Pose& pose) {
  const double w = pose.rotation.w(), x = pose.rotation.x(), y = pose.rotation.y(), z = pose.rotation.z();
  Mat4 m = Mat4::Identity();
  m(0, 0) = 1 - 2 * (y * y + z * z);
  m(0, 1) = 2 * (x * y - z * w);
  m(0, 2) = 2 * (x * z + y * w);
  m(1, 0) = 2 * (x * y + z * w);
  m(1, 1) = 1 - 2 * (x * x + z * z);
  m(1, 2) = 2 * (y * z - x * w);
  m(2, 0) = 2 * (x * z - y * w);
  m(2, 1) = 2 * (y * z + x * w);
  m(2, 2) = 1 - 2 * (x * x + y * y);
  m(0, 3) = pose.translation.x();
  m(1, 3) = pose.translation.y();
  m(2, 3) = pose.translation.z();
  return m;
}

std::map<std::string, Mat4> forward_kinematics(const robosetup::RobotModel& model,
                                               const std::map<std::string, double>& values) {
  std::map<std::string, Mat4> out;
  out[model.root_link()] = Mat4::Identity();
  // relax until every link is placed; fine for the small fixtures
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& j : model.joints()) {
      if (out.count(j.child_link) != 0 || out.count(j.parent_link) == 0) continue;
      Mat4 motion = Mat4::Identity();
      auto it = values.find(j.name);
      const double q = it == values.end() ? 0.0 : it->second;
      if (j.kind == JointKind::kRevolute || j.kind == JointKind::kContinuous) {
        motion = rot_axis(j.axis, q);
      } else if (j.kind == JointKind::kPrismatic) {
        motion = translation(j.axis / j.axis.norm() * q);
      }
      out[j.child_link] = out[j.parent_link] * from_pose(j.origin) * motion;
      changed = true;
    }
  }
  return out;
}

namespace {

Vec3 rotation_vector(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(c);
  const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (angle < 1e-12) return v / 2.0;
  return v * (angle / (2.0 * std::sin(angle)));
}

}  // namespace

Eigen::MatrixXd fd_jacobian(const robosetup::RobotModel& model, const std::vector<std::string>& joints,
                            const std::map<std::string, double>& values, const std::string& tip, double h) {
  Eigen::MatrixXd jac(6, static_cast<Eigen::Index>(joints.size()));
  for (std::size_t i = 0; i < joints.size(); ++i) {
    auto plus = values;
    auto minus = values;
    plus[joints[i]] += h;
    minus[joints[i]] -= h;
    const Mat4 tp = forward_kinematics(model, plus).at(tip);
    const Mat4 tm = forward_kinematics(model, minus).at(tip);
    const auto col = static_cast<Eigen::Index>(i);
    jac.block<3, 1>(0, col) = (tp.block<3, 1>(0, 3) - tm.block<3, 1>(0, 3)) / (2.0 * h);
    const Mat3 dr = tp.block<3, 3>(0, 0) * tm.block<3, 3>(0, 0).transpose();
    jac.block<3, 1>(3, col) = rotation_vector(dr) / (2.0 * h);
  }
  return jac;
}

namespace {

bool sphere_box(double r, const Vec3& c, const Vec3& half, const Mat4& tb) {
  const Mat3 rot = tb.block<3, 3>(0, 0);
  const Vec3 local = rot.transpose() * (c - tb.block<3, 1>(0, 3));
  Vec3 nearest;
  for (int i = 0; i < 3; ++i) nearest[i] = std::clamp(local[i], -half[i], half[i]);
  return (local - nearest).squaredNorm() <= r * r;
}

bool box_box(const Vec3& ha, const Mat4& ta, const Vec3& hb, const Mat4& tb) {
  const Mat3 ra = ta.block<3, 3>(0, 0);
  const Mat3 rb = tb.block<3, 3>(0, 0);
  const Vec3 d = tb.block<3, 1>(0, 3) - ta.block<3, 1>(0, 3);
  std::vector<Vec3> axes;
  for (int i = 0; i < 3; ++i) {
    axes.push_back(ra.col(i));
    axes.push_back(rb.col(i));
    for (int j = 0; j < 3; ++j) axes.push_back(ra.col(i).cross(rb.col(j)));
  }
  for (const Vec3& axis : axes) {
    if (axis.norm() < 1e-12) continue;
    const Vec3 n = axis.normalized();
    double pa = 0.0, pb = 0.0;
    for (int i = 0; i < 3; ++i) {
      pa += ha[i] * std::abs(n.dot(ra.col(i)));
      pb += hb[i] * std::abs(n.dot(rb.col(i)));
    }
    if (std::abs(n.dot(d)) > pa + pb) return false;
  }
  return true;
}

}  // namespace

bool primitives_intersect(const Shape& a, const Mat4& ta, const Shape& b, const Mat4& tb) {
  const auto* sa = std::get_if<Sphere>(&a);
  const auto* sb = std::get_if<Sphere>(&b);
  const auto* ba = std::get_if<Box>(&a);
  const auto* bb = std::get_if<Box>(&b);
  if (sa && sb) {
    const double r = sa->radius + sb->radius;
    return (ta.block<3, 1>(0, 3) - tb.block<3, 1>(0, 3)).squaredNorm() <= r * r;
  }
  if (sa && bb) return sphere_box(sa->radius, ta.block<3, 1>(0, 3), bb->half_extents, tb);
  if (ba && sb) return sphere_box(sb->radius, tb.block<3, 1>(0, 3), ba->half_extents, ta);
  if (ba && bb) return box_box(ba->half_extents, ta, bb->half_extents, tb);
  throw std::runtime_error("oracle handles spheres and boxes only");
}

double convex_sat_margin(const std::vector<Vec3>& va, const std::vector<std::array<int, 3>>& fa,
                         const std::vector<Vec3>& vb, const std::vector<std::array<int, 3>>& fb) {
  std::vector<Vec3> axes;
  std::vector<Vec3> edges_a, edges_b;
  auto collect = [&](const std::vector<Vec3>& v, const std::vector<std::array<int, 3>>& f, std::vector<Vec3>& edges) {
    for (const auto& t : f) {
      const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
      if (n.norm() > 1e-12) axes.push_back(n.normalized());
      for (int k = 0; k < 3; ++k) edges.push_back(v[t[(k + 1) % 3]] - v[t[k]]);
    }
  };
  collect(va, fa, edges_a);
  collect(vb, fb, edges_b);
  for (const auto& ea : edges_a) {
    for (const auto& eb : edges_b) {
      const Vec3 c = ea.cross(eb);
      if (c.norm() > 1e-9 * ea.norm() * eb.norm()) axes.push_back(c.normalized());
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec3& n : axes) {
    double amin = std::numeric_limits<double>::infinity(), amax = -amin, bmin = amin, bmax = -amin;
    for (const auto& p : va) {
      amin = std::min(amin, n.dot(p));
      amax = std::max(amax, n.dot(p));
    }
    for (const auto& p : vb) {
      bmin = std::min(bmin, n.dot(p));
      bmax = std::max(bmax, n.dot(p));
    }
    best = std::max(best, std::max(bmin - amax, amin - bmax));
  }
  return best;
}

GridCounts grid_pair_counts(const robosetup::RobotModel& model, int steps) {
  GridCounts out;
  const auto pairs = robosetup::collidable_pairs(model);
  for (const auto& p : pairs) {
    out.collisions[p] = 0;
    out.adjacent[p] = false;
  }
  for (const auto& j : model.joints()) {
    robosetup::LinkPair key = j.parent_link < j.child_link ? robosetup::LinkPair{j.parent_link, j.child_link}
                                                           : robosetup::LinkPair{j.child_link, j.parent_link};
    if (out.adjacent.count(key) != 0) out.adjacent[key] = true;
  }

  const auto& active = model.active_joints();
  std::vector<double> lower, upper;
  for (const auto& name : active) {
    const auto& j = model.joint(name);
    lower.push_back(j.limits->lower);
    upper.push_back(j.limits->upper);
  }

  auto collide_at = [&](const std::map<std::string, double>& values, const robosetup::LinkPair& p) {
    const auto tf = forward_kinematics(model, values);
    for (const auto& ga : model.link(p.first).collision) {
      for (const auto& gb : model.link(p.second).collision) {
        if (primitives_intersect(ga.shape, tf.at(p.first) * from_pose(ga.origin), gb.shape,
                                 tf.at(p.second) * from_pose(gb.origin))) {
          return true;
        }
      }
    }
    return false;
  };

  std::map<std::string, double> mid;
  for (std::size_t i = 0; i < active.size(); ++i) mid[active[i]] = 0.5 * (lower[i] + upper[i]);
  for (const auto& p : pairs) out.default_collision[p] = collide_at(mid, p);

  std::vector<int> index(active.size(), 0);
  while (true) {
    std::map<std::string, double> values;
    for (std::size_t i = 0; i < active.size(); ++i) {
      values[active[i]] = lower[i] + (upper[i] - lower[i]) * index[i] / (steps - 1);
    }
    ++out.states;
    for (const auto& p : pairs) {
      if (collide_at(values, p)) ++out.collisions[p];
    }
    std::size_t k = 0;
    while (k < index.size() && ++index[k] == steps) index[k++] = 0;
    if (k == index.size()) break;
  }
  return out;
}

std::map<robosetup::LinkPair, std::string> classify(const GridCounts& counts, double always_threshold) {
  std::map<robosetup::LinkPair, std::string> out;
  for (const auto& [pair, hits] : counts.collisions) {
    if (counts.adjacent.at(pair)) {
      out[pair] = "Adjacent";
    } else if (hits == 0 && !counts.default_collision.at(pair)) {
      out[pair] = "Never";
    } else if (static_cast<double>(hits) >= always_threshold * static_cast<double>(counts.states)) {
      out[pair] = "Always";
    } else {
      out[pair] = "";
    }
  }
  return out;
}

}  // namespace oracle
