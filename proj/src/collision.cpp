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

#include "robosetup/collision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "robosetup/error.hpp"

namespace robosetup {

namespace {

// Convex "core" plus a rounding radius: spheres are points, capsules are
// segments, boxes and meshes have no margin.
struct Core {
  enum class Kind { kPoint, kSegment, kBox, kMesh };
  Kind kind = Kind::kPoint;
  Vec3 center = Vec3::Zero();
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Vec3 half = Vec3::Zero();       // box half extents
  Vec3 p0 = Vec3::Zero();         // segment endpoints
  Vec3 p1 = Vec3::Zero();
  const ConvexMesh* mesh = nullptr;
  Pose pose;
  double margin = 0.0;

  Vec3 support(const Vec3& d) const {
    switch (kind) {
      case Kind::kPoint: return center;
      case Kind::kSegment: return d.dot(p1 - p0) >= 0.0 ? p1 : p0;
      case Kind::kBox: {
        const Vec3 local = rot.transpose() * d;
        const Vec3 corner(local.x() >= 0 ? half.x() : -half.x(), local.y() >= 0 ? half.y() : -half.y(),
                          local.z() >= 0 ? half.z() : -half.z());
        return center + rot * corner;
      }
      case Kind::kMesh: {
        const Vec3 local = rot.transpose() * d;
        const Vec3* best = &mesh->vertices.front();
        double best_dot = best->dot(local);
        for (const auto& v : mesh->vertices) {
          const double dot = v.dot(local);
          if (dot > best_dot) {
            best_dot = dot;
            best = &v;
          }
        }
        return pose * *best;
      }
    }
    return center;
  }
};

Core make_core(const Shape& shape, const Pose& pose) {
  Core c;
  c.pose = pose;
  c.center = pose.translation;
  c.rot = pose.rotation_matrix();
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    c.kind = Core::Kind::kPoint;
    c.margin = s->radius;
  } else if (const auto* b = std::get_if<Box>(&shape)) {
    c.kind = Core::Kind::kBox;
    c.half = b->half_extents;
  } else if (const auto* cyl = std::get_if<Cylinder>(&shape)) {
    // Bounding capsule: same radius, axis segment of the cylinder length.
    c.kind = Core::Kind::kSegment;
    const Vec3 axis = c.rot.col(2) * (cyl->length / 2.0);
    c.p0 = c.center - axis;
    c.p1 = c.center + axis;
    c.margin = cyl->radius;
  } else {
    c.kind = Core::Kind::kMesh;
    c.mesh = &std::get<ConvexMesh>(shape);
  }
  return c;
}

// Closest point to the origin on the hull of `simplex`, reducing the simplex
// to the supporting subset. Enumerates all sub-simplices.
Vec3 closest_on_simplex(std::vector<Vec3>& simplex) {
  const int n = static_cast<int>(simplex.size());
  double best_norm = std::numeric_limits<double>::infinity();
  Vec3 best_point = simplex.front();
  std::vector<Vec3> best_set{simplex.front()};
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) pts.push_back(simplex[static_cast<std::size_t>(i)]);
    }
    const int k = static_cast<int>(pts.size()) - 1;
    Vec3 point;
    if (k == 0) {
      point = pts[0];
    } else {
      Eigen::MatrixXd e(3, k);
      for (int i = 0; i < k; ++i) e.col(i) = pts[static_cast<std::size_t>(i + 1)] - pts[0];
      const Eigen::MatrixXd g = e.transpose() * e;
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
      if (lu.rank() < k) continue;
      const Eigen::VectorXd mu = lu.solve(-e.transpose() * pts[0]);
      const double lambda0 = 1.0 - mu.sum();
      constexpr double kSlack = -1e-12;
      if (lambda0 < kSlack || (mu.array() < kSlack).any()) continue;
      point = pts[0] + e * mu;
      if (k == 3) {
        // Origin inside the tetrahedron.
        simplex = pts;
        return Vec3::Zero();
      }
    }
    const double norm = point.squaredNorm();
    if (norm < best_norm) {
      best_norm = norm;
      best_point = point;
      best_set = pts;
    }
  }
  simplex = best_set;
  return best_point;
}

double gjk_core_distance(const Core& a, const Core& b) {
  auto support = [&](const Vec3& d) -> Vec3 { return a.support(d) - b.support(-d); };
  Vec3 dir = a.center - b.center;
  if (dir.squaredNorm() < 1e-24) dir = Vec3::UnitX();
  std::vector<Vec3> simplex{support(-dir)};
  Vec3 v = simplex.front();
  constexpr double kTolerance = 1e-9;
  for (int iter = 0; iter < 128; ++iter) {
    const double vv = v.squaredNorm();
    if (vv <= 1e-24) return 0.0;
    const Vec3 w = support(-v);
    // |v| is an upper bound, v.w/|v| a lower bound on the distance.
    if (vv - v.dot(w) <= kTolerance * std::sqrt(vv)) return std::sqrt(vv);
    for (const auto& s : simplex) {
      if ((s - w).squaredNorm() < 1e-24) return std::sqrt(vv);
    }
    simplex.push_back(w);
    v = closest_on_simplex(simplex);
    if (simplex.size() == 4) return 0.0;
  }
  return v.norm();
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  constexpr double kEps = 1e-18;
  if (a <= kEps && e <= kEps) return r.norm();
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

bool sphere_box(const Core& sphere, const Core& box) {
  const Vec3 local = box.rot.transpose() * (sphere.center - box.center);
  const Vec3 clamped = local.cwiseMax(-box.half).cwiseMin(box.half);
  return (local - clamped).squaredNorm() <= sphere.margin * sphere.margin;
}

bool box_box(const Core& a, const Core& b) {
  const Eigen::Matrix3d r = a.rot.transpose() * b.rot;
  const Vec3 t = a.rot.transpose() * (b.center - a.center);
  Eigen::Matrix3d abs_r = r.cwiseAbs();
  abs_r.array() += 1e-12;
  const Vec3& ha = a.half;
  const Vec3& hb = b.half;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > ha[i] + hb.dot(abs_r.row(i))) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(r.col(j))) > ha.dot(abs_r.col(j)) + hb[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    const int i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3;
      const int j2 = (j + 2) % 3;
      const double ra = ha[i1] * abs_r(i2, j) + ha[i2] * abs_r(i1, j);
      const double rb = hb[j1] * abs_r(i, j2) + hb[j2] * abs_r(i, j1);
      if (std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j)) > ra + rb) return false;
    }
  }
  return true;
}

bool cores_intersect(const Core& a, const Core& b) {
  using K = Core::Kind;
  const double reach = a.margin + b.margin;
  if (a.kind == K::kPoint && b.kind == K::kPoint) return (a.center - b.center).norm() <= reach;
  if (a.kind == K::kPoint && b.kind == K::kBox) return sphere_box(a, b);
  if (a.kind == K::kBox && b.kind == K::kPoint) return sphere_box(b, a);
  if (a.kind == K::kBox && b.kind == K::kBox) return box_box(a, b);
  if (a.kind == K::kPoint && b.kind == K::kSegment) return point_segment_distance(a.center, b.p0, b.p1) <= reach;
  if (a.kind == K::kSegment && b.kind == K::kPoint) return point_segment_distance(b.center, a.p0, a.p1) <= reach;
  if (a.kind == K::kSegment && b.kind == K::kSegment) {
    return segment_segment_distance(a.p0, a.p1, b.p0, b.p1) <= reach;
  }
  return gjk_core_distance(a, b) <= reach;
}

}  // namespace

bool shapes_intersect(const Shape& a, const Pose& pose_a, const Shape& b, const Pose& pose_b) {
  return cores_intersect(make_core(a, pose_a), make_core(b, pose_b));
}

double shape_distance(const Shape& a, const Pose& pose_a, const Shape& b, const Pose& pose_b) {
  const Core ca = make_core(a, pose_a);
  const Core cb = make_core(b, pose_b);
  return std::max(0.0, gjk_core_distance(ca, cb) - ca.margin - cb.margin);
}

std::string_view to_string(AcmReason reason) {
  switch (reason) {
    case AcmReason::kAdjacent: return "Adjacent";
    case AcmReason::kNever: return "Never";
    case AcmReason::kAlways: return "Always";
    case AcmReason::kDefault: return "Default";
    case AcmReason::kUser: return "User";
  }
  return "User";
}

AcmReason acm_reason_from_string(std::string_view text) {
  for (auto r : {AcmReason::kAdjacent, AcmReason::kNever, AcmReason::kAlways, AcmReason::kDefault, AcmReason::kUser}) {
    if (to_string(r) == text) return r;
  }
  throw Error(ErrorCode::kParse, "unknown collision reason '" + std::string(text) + "'", std::string(text));
}

LinkPair AllowedCollisionMatrix::key(const std::string& a, const std::string& b) {
  return a < b ? LinkPair{a, b} : LinkPair{b, a};
}

void AllowedCollisionMatrix::set(const std::string& a, const std::string& b, AcmEntry entry) {
  if (a == b) throw Error(ErrorCode::kValidation, "collision pair needs two distinct links", a);
  entries_[key(a, b)] = std::move(entry);
}

void AllowedCollisionMatrix::erase(const std::string& a, const std::string& b) { entries_.erase(key(a, b)); }

const AcmEntry* AllowedCollisionMatrix::find(const std::string& a, const std::string& b) const {
  auto it = entries_.find(key(a, b));
  return it == entries_.end() ? nullptr : &it->second;
}

bool AllowedCollisionMatrix::is_disabled(const std::string& a, const std::string& b) const {
  const AcmEntry* e = find(a, b);
  return e != nullptr && e->disabled;
}

std::size_t AllowedCollisionMatrix::disabled_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const auto& kv) { return kv.second.disabled; }));
}

void PlanningSceneWorld::upsert(WorldObject object) {
  for (auto& o : objects) {
    if (o.name == object.name) {
      o = std::move(object);
      return;
    }
  }
  objects.push_back(std::move(object));
}

bool PlanningSceneWorld::remove(const std::string& name) {
  auto it = std::find_if(objects.begin(), objects.end(), [&](const WorldObject& o) { return o.name == name; });
  if (it == objects.end()) return false;
  objects.erase(it);
  return true;
}

const WorldObject* PlanningSceneWorld::find(const std::string& name) const {
  for (const auto& o : objects) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

void PlanningSceneWorld::check() const {
  std::set<std::string> names;
  for (const auto& o : objects) {
    if (o.name.empty()) throw Error(ErrorCode::kValidation, "world object needs a name");
    if (!names.insert(o.name).second) {
      throw Error(ErrorCode::kValidation, "duplicate world object '" + o.name + "'", o.name);
    }
    try {
      check_shape(o.shape);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, std::string(e.what()) + " (" + o.name + ")", o.name);
    }
  }
}

CollisionContext::CollisionContext(const RobotModel& model, const AllowedCollisionMatrix& acm,
                                   const PlanningSceneWorld& world, const VirtualJoint* virtual_joint)
    : model_(&model), world_(world), virtual_joint_(virtual_joint), pair_names_(collidable_pairs(model)) {
  for (const auto& [a, b] : pair_names_) {
    pair_links_.emplace_back(*model.link_index(a), *model.link_index(b));
    pair_enabled_.push_back(!acm.is_disabled(a, b));
  }
  for (std::size_t i = 0; i < model.links().size(); ++i) {
    if (!model.links()[i].collision.empty()) geometric_links_.push_back(i);
  }
}

std::size_t CollisionContext::enabled_pair_count() const {
  return static_cast<std::size_t>(std::count(pair_enabled_.begin(), pair_enabled_.end(), true));
}

bool CollisionContext::links_collide(const std::vector<Pose>& poses, std::size_t a, std::size_t b) const {
  for (const auto& ga : model_->links()[a].collision) {
    const Pose pa = poses[a] * ga.origin;
    for (const auto& gb : model_->links()[b].collision) {
      if (shapes_intersect(ga.shape, pa, gb.shape, poses[b] * gb.origin)) return true;
    }
  }
  return false;
}

bool CollisionContext::pair_in_collision(const std::vector<Pose>& poses, std::size_t pair) const {
  return links_collide(poses, pair_links_[pair].first, pair_links_[pair].second);
}

CollisionResult CollisionContext::check(const RobotState& state, const CollisionFlags& flags) const {
  CollisionResult result;
  const auto poses = link_poses(*model_, state, virtual_joint_);
  if (flags.self) {
    for (std::size_t p = 0; p < pair_links_.size(); ++p) {
      if (!pair_enabled_[p]) continue;
      ++result.checks_performed;
      if (links_collide(poses, pair_links_[p].first, pair_links_[p].second)) {
        result.contacts.push_back({pair_names_[p].first, pair_names_[p].second, ContactKind::kSelf});
        if (flags.boolean_only) break;
      }
    }
  }
  if (flags.world && !(flags.boolean_only && !result.contacts.empty())) {
    for (std::size_t l : geometric_links_) {
      const Link& link = model_->links()[l];
      bool stop = false;
      for (const auto& object : world_.objects) {
        ++result.checks_performed;
        const Pose op = object.pose();
        bool hit = false;
        for (const auto& g : link.collision) {
          if (shapes_intersect(g.shape, poses[l] * g.origin, object.shape, op)) {
            hit = true;
            break;
          }
        }
        if (hit) {
          result.contacts.push_back({link.name, object.name, ContactKind::kWorld});
          if (flags.boolean_only) {
            stop = true;
            break;
          }
        }
      }
      if (stop) break;
    }
  }
  result.in_collision = !result.contacts.empty();
  return result;
}

CollisionResult check_state(const RobotModel& model, const RobotState& state, const AllowedCollisionMatrix& acm,
                            const PlanningSceneWorld& world, const CollisionFlags& flags,
                            const VirtualJoint* virtual_joint) {
  return CollisionContext(model, acm, world, virtual_joint).check(state, flags);
}

std::vector<std::vector<double>> bisection_levels(double distance, double step) {
  std::vector<std::vector<double>> levels{{0.0, 1.0}};
  if (!(step > 0.0)) throw Error(ErrorCode::kValidation, "motion check step must be positive");
  double spacing = distance;
  std::size_t denominator = 1;
  while (spacing > step) {
    spacing /= 2.0;
    denominator *= 2;
    std::vector<double> level;
    for (std::size_t k = 1; k < denominator; k += 2) {
      level.push_back(static_cast<double>(k) / static_cast<double>(denominator));
    }
    levels.push_back(std::move(level));
  }
  return levels;
}

MotionCheck validate_motion(const std::vector<VariableBounds>& bounds, const RobotState& from, const RobotState& to,
                            double step, const StateValidityFn& is_valid) {
  MotionCheck out;
  const double distance = state_distance(bounds, from, to);
  for (const auto& level : bisection_levels(distance, step)) {
    for (double t : level) {
      ++out.states_checked;
      if (!is_valid(interpolate(bounds, from, to, t))) {
        // Level entries are ascending, so this is the smallest failing t at this depth.
        out.valid = false;
        out.first_invalid_t = t;
        return out;
      }
    }
  }
  return out;
}

MotionCheck validate_motion(const RobotModel& model, const JointGroup& group, const RobotState& from,
                            const RobotState& to, const AllowedCollisionMatrix& acm, const PlanningSceneWorld& world,
                            double resolution_fraction, const VirtualJoint* virtual_joint) {
  if (!(resolution_fraction > 0.0 && resolution_fraction < 1.0)) {
    throw Error(ErrorCode::kValidation, "resolution fraction must lie in (0, 1)");
  }
  const auto bounds = group_bounds(model, group, virtual_joint);
  const double step = resolution_fraction * space_extent(bounds);
  const CollisionContext ctx(model, acm, world, virtual_joint);
  return validate_motion(bounds, from, to, step, [&](const RobotState& s) {
    return !ctx.check(s, CollisionFlags{.boolean_only = true}).in_collision;
  });
}

}  // namespace robosetup
