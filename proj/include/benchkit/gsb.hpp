// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Good/Same/Bad pairwise preference studies. Tasks pair two systems' results
// for one try-on pair and show them in a seeded random left/right order;
// votes are stored by screen side and only mapped back to systems when a
// summary is computed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "benchkit/catalog.hpp"
#include "benchkit/generation.hpp"
#include "benchkit/jsonl.hpp"
#include "benchkit/pairing.hpp"

namespace benchkit {

enum class SideAssignment { kALeft, kARight };
enum class GsbChoice { kLeftBetter, kSame, kRightBetter };
enum class TaskStatus { kOpen, kDone };
/// Outcome from one system's point of view.
enum class GsbOutcome { kWin, kSame, kLoss };

template <>
struct EnumLabels<SideAssignment> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"a_left", "a_right"});
};
template <>
struct EnumLabels<GsbChoice> {
  static constexpr auto kLabels =
      std::to_array<std::string_view>({"left_better", "same", "right_better"});
};
template <>
struct EnumLabels<TaskStatus> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"open", "done"});
};
template <>
struct EnumLabels<GsbOutcome> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"win", "same", "loss"});
};

struct GsbTask {
  std::string task_id;
  std::string pair_id;
  std::string system_a;
  std::string system_b;
  SideAssignment side = SideAssignment::kALeft;
  std::size_t garment_count = 0;
  TaskStatus status = TaskStatus::kOpen;
  std::string person_uri;
  std::vector<std::string> garment_uris;  // prompt order
  std::string result_a_uri;
  std::string result_b_uri;

  const std::string& left_uri() const {
    return side == SideAssignment::kALeft ? result_a_uri : result_b_uri;
  }
  const std::string& right_uri() const {
    return side == SideAssignment::kALeft ? result_b_uri : result_a_uri;
  }
};

/// Full task record, including system identities. Never send to raters.
Json ToJson(const GsbTask& task);
GsbTask GsbTaskFromJson(const Json& j);
std::vector<GsbTask> LoadGsbTasks(const std::string& path);

/// Maps an internal image uri to the reference a rater's client may fetch.
using ImageRefFn = std::function<std::string(const std::string& uri)>;

/// Document shown to a rater: task id, person, garments and the two results
/// by side. Contains no system or pair identifiers.
Json RaterPayload(const GsbTask& task, const ImageRefFn& image_ref);

struct GsbBuildResult {
  std::vector<GsbTask> tasks;
  std::size_t skipped = 0;  // pairs without ok results from both systems
  std::vector<std::string> skipped_pairs;
};

/// One task per pair where both systems produced an image, in pair order.
/// Side assignment is a fair coin per task drawn from `seed`.
GsbBuildResult BuildGsbTasks(std::span<const TryOnPair> pairs,
                             std::span<const GenerationResult> results,
                             const std::string& system_a, const std::string& system_b,
                             const Catalog& catalog, std::uint64_t seed);

struct GsbVote {
  std::string task_id;
  std::string rater_id;
  GsbChoice choice = GsbChoice::kSame;
  std::int64_t timestamp_ms = 0;
};

Json ToJson(const GsbVote& vote);
GsbVote GsbVoteFromJson(const Json& j);

/// Resolves a vote to an outcome for `system`, which must be one of the
/// task's two systems.
GsbOutcome OutcomeFor(const GsbTask& task, GsbChoice choice, const std::string& system);

/// Task registry plus vote journal. Uniqueness of (task, rater) is checked
/// and the vote appended under one lock, so concurrent raters cannot both
/// record the same vote. A task is done once it holds `votes_per_task` votes.
class GsbStore {
 public:
  /// Votes already in `journal` are replayed; a replayed duplicate is ignored.
  GsbStore(std::vector<GsbTask> tasks, std::shared_ptr<Journal> journal,
           std::size_t votes_per_task = 1);

  void RecordVote(const GsbVote& vote);

  std::vector<GsbTask> Tasks() const;  // with current status
  std::vector<GsbVote> Votes() const;
  const GsbTask* Find(const std::string& task_id) const;
  bool HasVoted(const std::string& task_id, const std::string& rater_id) const;
  TaskStatus Status(const std::string& task_id) const;
  std::size_t votes_per_task() const { return votes_per_task_; }

 private:
  void Apply(const GsbVote& vote);

  mutable std::shared_mutex mu_;
  std::vector<GsbTask> tasks_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::set<std::string>> raters_;  // task -> raters
  std::vector<GsbVote> votes_;
  std::shared_ptr<Journal> journal_;
  std::size_t votes_per_task_;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GsbRow {
  std::size_t garment_count = 0;  // 0 for the overall row
  std::size_t n = 0;              // resolved tasks
  std::size_t n_votes = 0;
  std::size_t win = 0, same = 0, loss = 0;
  double win_pct = 0.0, same_pct = 0.0, loss_pct = 0.0;  // one decimal
  std::optional<ConfidenceInterval> win_ci;              // percent
};

struct GsbComparison {
  std::string reference;
  std::string opponent;
  GsbRow overall;
  std::vector<GsbRow> buckets;  // ascending garment_count, non-empty only
  const GsbRow* Find(std::size_t garment_count) const;
};

struct GsbSummary {
  std::string reference_system;
  std::vector<GsbComparison> comparisons;  // sorted by opponent
  const GsbComparison* Find(const std::string& opponent) const;
};

struct GsbAggregateOptions {
  bool bootstrap = false;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
};

/// Win/same/loss shares from `reference_system`'s side. Votes on one task are
/// resolved by majority, with ties counting as same. Tasks that do not
/// involve the reference system or have no votes are ignored.
GsbSummary AggregateGsb(std::span<const GsbVote> votes, std::span<const GsbTask> tasks,
                        const std::string& reference_system,
                        const GsbAggregateOptions& options = {});

Json ToJson(const GsbSummary& summary);

/// Stacked-bar data table: one CSV line per (opponent, bucket) plus overall.
std::string GsbBarTable(const GsbSummary& summary);

}  // namespace benchkit
