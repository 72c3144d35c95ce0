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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robosetup/kinematics.hpp"
#include "robosetup/robot_model.hpp"

namespace robosetup {

// ---------------------------------------------------------------------------
// Narrow phase
// ---------------------------------------------------------------------------

/// Exact for sphere/box pairs (separating axes for box-box). Cylinders are
/// replaced by their bounding capsule. Meshes, and any pair without a closed
/// form, go through GJK with a 1e-9 termination tolerance. Touching counts
/// as intersecting.
bool shapes_intersect(const Shape& a, const Pose& pose_a, const Shape& b, const Pose& pose_b);

/// Euclidean distance between two shapes (0 when overlapping), with the same
/// cylinder-to-capsule substitution. Computed with GJK for every pair.
double shape_distance(const Shape& a, const Pose& pose_a, const Shape& b, const Pose& pose_b);

// ---------------------------------------------------------------------------
// Allowed collision matrix
// ---------------------------------------------------------------------------

enum class AcmReason { kAdjacent, kNever, kAlways, kDefault, kUser };

std::string_view to_string(AcmReason reason);
AcmReason acm_reason_from_string(std::string_view text);

struct PairStats {
  std::uint64_t samples = 0;
  std::uint64_t collisions = 0;

  bool operator==(const PairStats&) const = default;
};

struct AcmEntry {
  bool disabled = true;
  AcmReason reason = AcmReason::kUser;
  std::optional<PairStats> stats;

  bool operator==(const AcmEntry&) const = default;
};

/// Per-link-pair collision-check switches. Keys are unordered pairs; pairs
/// without an entry are checked.
class AllowedCollisionMatrix {
 public:
  void set(const std::string& a, const std::string& b, AcmEntry entry);
  void erase(const std::string& a, const std::string& b);
  const AcmEntry* find(const std::string& a, const std::string& b) const;
  bool is_disabled(const std::string& a, const std::string& b) const;
  std::size_t disabled_count() const;

  /// Keyed by (min(a,b), max(a,b)), so iteration is lexicographic.
  const std::map<LinkPair, AcmEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const AllowedCollisionMatrix&) const = default;

 private:
  static LinkPair key(const std::string& a, const std::string& b);
  std::map<LinkPair, AcmEntry> entries_;
};

// ---------------------------------------------------------------------------
// Scene and state queries
// ---------------------------------------------------------------------------

struct WorldObject {
  std::string name;
  Shape shape;
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();

  Pose pose() const { return Pose::from_xyz_rpy(xyz, rpy); }
};

struct PlanningSceneWorld {
  std::vector<WorldObject> objects;

  /// Adds or replaces by name.
  void upsert(WorldObject object);
  bool remove(const std::string& name);
  const WorldObject* find(const std::string& name) const;
  /// Throws Error(kValidation) for duplicate names or invalid shapes.
  void check() const;
};

enum class ContactKind { kSelf, kWorld };

struct Contact {
  std::string first;
  std::string second;
  ContactKind kind = ContactKind::kSelf;
};

struct CollisionResult {
  bool in_collision = false;
  std::vector<Contact> contacts;
  std::size_t checks_performed = 0;
};

struct CollisionFlags {
  bool boolean_only = false;  // stop at the first contact
  bool self = true;
  bool world = true;
};

/// Precomputed pair lists for repeated queries against one model, ACM and world.
/// The model and virtual joint are referenced and must outlive the context.
class CollisionContext {
 public:
  CollisionContext(const RobotModel& model, const AllowedCollisionMatrix& acm, const PlanningSceneWorld& world,
                   const VirtualJoint* virtual_joint = nullptr);

  CollisionResult check(const RobotState& state, const CollisionFlags& flags = {}) const;

  /// Collidable link pairs in lexicographic order (independent of the ACM).
  const std::vector<LinkPair>& pairs() const { return pair_names_; }
  std::size_t enabled_pair_count() const;
  /// Narrow-phase test of one collidable pair at the given link poses.
  bool pair_in_collision(const std::vector<Pose>& poses, std::size_t pair) const;
  const RobotModel& model() const { return *model_; }
  const VirtualJoint* virtual_joint() const { return virtual_joint_; }

 private:
  bool links_collide(const std::vector<Pose>& poses, std::size_t a, std::size_t b) const;

  const RobotModel* model_;
  PlanningSceneWorld world_;  // copied: callers often pass temporaries
  const VirtualJoint* virtual_joint_;
  std::vector<LinkPair> pair_names_;
  std::vector<std::pair<std::size_t, std::size_t>> pair_links_;
  std::vector<bool> pair_enabled_;
  std::vector<std::size_t> geometric_links_;
};

CollisionResult check_state(const RobotModel& model, const RobotState& state, const AllowedCollisionMatrix& acm,
                            const PlanningSceneWorld& world, const CollisionFlags& flags = {},
                            const VirtualJoint* virtual_joint = nullptr);

// ---------------------------------------------------------------------------
// Motion validation
// ---------------------------------------------------------------------------

struct MotionCheck {
  bool valid = true;
  std::optional<double> first_invalid_t;
  std::size_t states_checked = 0;
};

/// Interpolation parameters in evaluation order: 0, 1, then midpoints level
/// by level until neighbours are at most `step` apart for a segment of
/// configuration length `distance`. Coarser steps yield a prefix-closed
/// subset of the finer schedule.
std::vector<std::vector<double>> bisection_levels(double distance, double step);

/// Returns true when the state is collision-free.
using StateValidityFn = std::function<bool(const RobotState&)>;

MotionCheck validate_motion(const std::vector<VariableBounds>& bounds, const RobotState& from, const RobotState& to,
                            double step, const StateValidityFn& is_valid);

/// step = resolution_fraction * space_extent(group).
MotionCheck validate_motion(const RobotModel& model, const JointGroup& group, const RobotState& from,
                            const RobotState& to, const AllowedCollisionMatrix& acm, const PlanningSceneWorld& world,
                            double resolution_fraction, const VirtualJoint* virtual_joint = nullptr);

}  // namespace robosetup
