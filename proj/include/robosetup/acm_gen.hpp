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

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "robosetup/collision.hpp"
#include "robosetup/json_io.hpp"
#include "robosetup/robot_model.hpp"

namespace robosetup {

struct AcmGenParams {
  std::uint64_t sample_count = 10000;
  double always_threshold = 0.95;
  std::uint64_t rng_seed = 0;
  std::uint64_t progress_granularity = 250;
  unsigned threads = 0;  // 0: hardware concurrency

  void check() const;
};

/// Sampling statistics for one collidable pair.
struct PairReport {
  PairStats stats;
  bool default_collision = false;  // collided in the default state

  bool operator==(const PairReport&) const = default;
};

struct AcmReport {
  std::string robot;
  AcmGenParams params;
  AllowedCollisionMatrix acm;
  /// Every collidable pair exactly once.
  std::map<LinkPair, PairReport> pairs;
  std::map<AcmReason, std::size_t> disabled_by_reason;
  double elapsed_seconds = 0.0;
  std::string caveat;
};

struct AcmProgress {
  std::uint64_t done = 0;
  std::uint64_t total = 0;
  /// Collision counts so far, aligned with collidable_pairs(model).
  std::vector<std::uint64_t> partial_collisions;
  bool finished = false;
  bool cancelled = false;
  std::optional<std::string> error;
};

using AcmProgressFn =
    std::function<void(std::uint64_t done, std::uint64_t total, const std::vector<std::uint64_t>& partial)>;

/// Three-stage self-collision matrix generation:
///   1. pairs joined by a joint are disabled as Adjacent;
///   2. the default state is checked and colliding pairs are tagged;
///   3. `sample_count` random states are checked for every remaining pair.
/// Pairs that never collided are disabled as Never, pairs colliding in at
/// least `always_threshold` of the samples as Always. Results do not depend
/// on the thread count. A stop request aborts with Error(kConflict).
AcmReport generate_acm(const RobotModel& model, const AcmGenParams& params, std::stop_token stop = {},
                       const AcmProgressFn& on_progress = {});

/// Report serialization. Timing is omitted unless requested so the document
/// is byte-identical across runs with equal inputs.
Json acm_report_to_json(const AcmReport& report, bool include_timing = false);
/// Reads the disabled entries (with stats) back from a report document.
AllowedCollisionMatrix acm_from_report_json(const Json& json);

/// Background generation with pollable progress.
class AcmJob {
 public:
  AcmJob(std::shared_ptr<const RobotModel> model, AcmGenParams params,
         std::function<void(const AcmReport&)> on_complete = {});
  ~AcmJob();
  AcmJob(const AcmJob&) = delete;
  AcmJob& operator=(const AcmJob&) = delete;

  AcmProgress progress() const;
  std::optional<AcmReport> result() const;
  void cancel();
  void wait();

 private:
  void run(std::stop_token stop);

  std::shared_ptr<const RobotModel> model_;
  AcmGenParams params_;
  std::function<void(const AcmReport&)> on_complete_;
  mutable std::mutex mutex_;
  AcmProgress progress_;
  std::optional<AcmReport> result_;
  std::jthread thread_;
};

/// Job registry keyed by id ("acm-1", "acm-2", ...).
class AcmJobTable {
 public:
  std::string start(std::shared_ptr<const RobotModel> model, const AcmGenParams& params,
                    std::function<void(const AcmReport&)> on_complete = {});
  /// Throws Error(kNotFound) for unknown ids.
  AcmProgress progress(const std::string& id) const;
  std::shared_ptr<AcmJob> get(const std::string& id) const;
  bool any_running() const;
  void cancel_all();

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<AcmJob>> jobs_;
  std::uint64_t next_id_ = 1;
};

/// Convenience wrapper matching the polling contract.
inline AcmProgress acm_progress(const AcmJobTable& table, const std::string& id) { return table.progress(id); }

}  // namespace robosetup
