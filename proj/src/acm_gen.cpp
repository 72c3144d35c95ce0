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

#include "robosetup/acm_gen.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "robosetup/error.hpp"
#include "robosetup/rng.hpp"

namespace robosetup {

void AcmGenParams::check() const {
  if (sample_count == 0) throw Error(ErrorCode::kValidation, "sample_count must be at least 1", "sample_count");
  if (!(always_threshold > 0.0 && always_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation, "always_threshold must lie in (0, 1]", "always_threshold");
  }
  if (progress_granularity == 0) {
    throw Error(ErrorCode::kValidation, "progress_granularity must be positive", "progress_granularity");
  }
}

namespace {

constexpr const char* kCaveat =
    "Never entries come from random sampling and are not a proof of separation; a pair that collides only in "
    "rare configurations can be disabled by mistake. Raise sample_count to lower that risk.";

}  // namespace

AcmReport generate_acm(const RobotModel& model, const AcmGenParams& params, std::stop_token stop,
                       const AcmProgressFn& on_progress) {
  params.check();
  const auto started = std::chrono::steady_clock::now();
  const JointGroup whole = whole_robot_group(model);
  const auto bounds = group_bounds(model, whole);  // throws on unbounded joints

  AllowedCollisionMatrix empty_acm;
  PlanningSceneWorld no_world;
  const CollisionContext ctx(model, empty_acm, no_world);
  const auto& pairs = ctx.pairs();

  AcmReport report;
  report.robot = model.name();
  report.params = params;
  report.caveat = kCaveat;

  // Stage 1: links joined by a joint.
  std::set<LinkPair> adjacent;
  for (const auto& joint : model.joints()) {
    if (model.link(joint.parent_link).collision.empty() || model.link(joint.child_link).collision.empty()) continue;
    LinkPair key = joint.parent_link < joint.child_link ? LinkPair{joint.parent_link, joint.child_link}
                                                        : LinkPair{joint.child_link, joint.parent_link};
    adjacent.insert(key);
    report.acm.set(key.first, key.second, AcmEntry{true, AcmReason::kAdjacent, std::nullopt});
  }
  std::vector<std::size_t> sampled;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    report.pairs[pairs[p]] = PairReport{};
    if (adjacent.count(pairs[p]) == 0) sampled.push_back(p);
  }

  // Stage 2: default state.
  {
    const auto poses = link_poses(model, default_state(model));
    for (std::size_t p : sampled) {
      if (ctx.pair_in_collision(poses, p)) report.pairs[pairs[p]].default_collision = true;
    }
  }

  // Stage 3: random states, one rng stream per sample index.
  const std::uint64_t total = params.sample_count;
  std::vector<std::uint64_t> counts(pairs.size(), 0);
  std::uint64_t done = 0;
  std::mutex merge_mutex;
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr failure;
  const std::uint64_t chunk = params.progress_granularity;
  const std::uint64_t chunk_count = (total + chunk - 1) / chunk;

  auto worker = [&] {
    std::vector<std::uint64_t> local(pairs.size(), 0);
    try {
      while (!aborted.load()) {
        const std::uint64_t c = next_chunk.fetch_add(1);
        if (c >= chunk_count) break;
        if (stop.stop_requested()) {
          aborted = true;
          break;
        }
        std::fill(local.begin(), local.end(), 0);
        const std::uint64_t begin = c * chunk;
        const std::uint64_t end = std::min(total, begin + chunk);
        for (std::uint64_t i = begin; i < end; ++i) {
          Rng rng(derive_seed(params.rng_seed, i));
          const auto state = sample_random_state(model, whole, rng);
          const auto poses = link_poses(model, state);
          for (std::size_t p : sampled) {
            if (ctx.pair_in_collision(poses, p)) ++local[p];
          }
        }
        std::lock_guard lock(merge_mutex);
        for (std::size_t p = 0; p < local.size(); ++p) counts[p] += local[p];
        done += end - begin;
        if (on_progress) on_progress(done, total, counts);
      }
    } catch (...) {
      std::lock_guard lock(merge_mutex);
      if (!failure) failure = std::current_exception();
      aborted = true;
    }
  };

  unsigned threads = params.threads != 0 ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunk_count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  if (aborted || stop.stop_requested()) throw Error(ErrorCode::kConflict, "ACM generation cancelled");

  for (std::size_t p : sampled) {
    PairReport& pr = report.pairs[pairs[p]];
    pr.stats = PairStats{total, counts[p]};
    const double frequency = static_cast<double>(counts[p]) / static_cast<double>(total);
    if (counts[p] == 0 && !pr.default_collision) {
      report.acm.set(pairs[p].first, pairs[p].second, AcmEntry{true, AcmReason::kNever, pr.stats});
    } else if (frequency >= params.always_threshold) {
      report.acm.set(pairs[p].first, pairs[p].second, AcmEntry{true, AcmReason::kAlways, pr.stats});
    }
  }
  for (const auto& [key, entry] : report.acm.entries()) {
    if (entry.disabled) ++report.disabled_by_reason[entry.reason];
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

Json acm_report_to_json(const AcmReport& report, bool include_timing) {
  Json pairs = Json::array();
  for (const auto& [key, pr] : report.pairs) {
    Json row{{"link1", key.first},
             {"link2", key.second},
             {"samples", pr.stats.samples},
             {"collisions", pr.stats.collisions},
             {"default_collision", pr.default_collision}};
    if (const AcmEntry* e = report.acm.find(key.first, key.second); e != nullptr && e->disabled) {
      row["disabled"] = true;
      row["reason"] = std::string(to_string(e->reason));
    } else {
      row["disabled"] = false;
    }
    pairs.push_back(std::move(row));
  }
  Json by_reason = Json::object();
  for (const auto& [reason, n] : report.disabled_by_reason) by_reason[std::string(to_string(reason))] = n;
  Json out{{"robot", report.robot},
           {"params",
            Json{{"sample_count", report.params.sample_count},
                 {"always_threshold", report.params.always_threshold},
                 {"seed", report.params.rng_seed}}},
           {"pairs", pairs},
           {"disabled_by_reason", by_reason},
           {"total_disabled", report.acm.disabled_count()},
           {"caveat", report.caveat}};
  if (include_timing) out["elapsed_seconds"] = report.elapsed_seconds;
  return out;
}

AllowedCollisionMatrix acm_from_report_json(const Json& json) {
  AllowedCollisionMatrix acm;
  try {
    for (const auto& row : json.at("pairs")) {
      if (!row.value("disabled", false)) continue;
      const AcmReason reason = acm_reason_from_string(row.at("reason").get<std::string>());
      std::optional<PairStats> stats;
      if (reason != AcmReason::kAdjacent && reason != AcmReason::kUser) {
        stats = PairStats{row.at("samples").get<std::uint64_t>(), row.at("collisions").get<std::uint64_t>()};
      }
      acm.set(row.at("link1").get<std::string>(), row.at("link2").get<std::string>(),
              AcmEntry{true, reason, stats});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad ACM report: ") + e.what());
  }
  return acm;
}

AcmJob::AcmJob(std::shared_ptr<const RobotModel> model, AcmGenParams params,
               std::function<void(const AcmReport&)> on_complete)
    : model_(std::move(model)), params_(params), on_complete_(std::move(on_complete)) {
  params_.check();
  progress_.total = params_.sample_count;
  thread_ = std::jthread([this](std::stop_token stop) { run(stop); });
}

AcmJob::~AcmJob() {
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

void AcmJob::run(std::stop_token stop) {
  try {
    AcmReport report = generate_acm(*model_, params_, stop,
                                    [this](std::uint64_t done, std::uint64_t, const std::vector<std::uint64_t>& p) {
                                      std::lock_guard lock(mutex_);
                                      progress_.done = done;
                                      progress_.partial_collisions = p;
                                    });
    if (on_complete_) on_complete_(report);
    std::lock_guard lock(mutex_);
    result_ = std::move(report);
    progress_.done = progress_.total;
    progress_.finished = true;
  } catch (const Error& e) {
    std::lock_guard lock(mutex_);
    progress_.finished = true;
    if (stop.stop_requested()) {
      progress_.cancelled = true;
    } else {
      progress_.error = e.what();
    }
  } catch (const std::exception& e) {
    std::lock_guard lock(mutex_);
    progress_.finished = true;
    progress_.error = e.what();
  }
}

AcmProgress AcmJob::progress() const {
  std::lock_guard lock(mutex_);
  return progress_;
}

std::optional<AcmReport> AcmJob::result() const {
  std::lock_guard lock(mutex_);
  return result_;
}

void AcmJob::cancel() { thread_.request_stop(); }

void AcmJob::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string AcmJobTable::start(std::shared_ptr<const RobotModel> model, const AcmGenParams& params,
                               std::function<void(const AcmReport&)> on_complete) {
  std::lock_guard lock(mutex_);
  for (const auto& [id, job] : jobs_) {
    if (!job->progress().finished) throw Error(ErrorCode::kConflict, "an ACM job is already running", id);
  }
  const std::string id = "acm-" + std::to_string(next_id_++);
  jobs_[id] = std::make_shared<AcmJob>(std::move(model), params, std::move(on_complete));
  return id;
}

AcmProgress AcmJobTable::progress(const std::string& id) const { return get(id)->progress(); }

std::shared_ptr<AcmJob> AcmJobTable::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "unknown ACM job '" + id + "'", id);
  return it->second;
}

bool AcmJobTable::any_running() const {
  std::lock_guard lock(mutex_);
  return std::any_of(jobs_.begin(), jobs_.end(), [](const auto& kv) { return !kv.second->progress().finished; });
}

void AcmJobTable::cancel_all() {
  std::lock_guard lock(mutex_);
  for (auto& [id, job] : jobs_) job->cancel();
}

}  // namespace robosetup
