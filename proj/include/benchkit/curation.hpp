// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "benchkit/adapters.hpp"
#include "benchkit/catalog.hpp"
#include "benchkit/jsonl.hpp"

namespace benchkit {

/// Rule names reported in rejections.
inline constexpr std::string_view kRuleMinResolution = "min_resolution";
inline constexpr std::string_view kRuleAspectRatio = "aspect_ratio";
inline constexpr std::string_view kRuleSingleSubject = "single_primary_subject";
inline constexpr std::string_view kRuleDedup = "dedup";
inline constexpr std::string_view kRuleNsfw = "nsfw";

struct FilterRuleSet {
  int min_resolution = 512;  // pixels, shorter side
  double aspect_ratio_min = 1.0 / 3.0;
  double aspect_ratio_max = 3.0;
  bool require_single_primary_subject = true;  // model images only
  int dedup_distance_threshold = 4;            // perceptual-hash Hamming distance
  bool nsfw_reject = true;

  /// Invariant violations; empty when the rule set is usable.
  std::vector<std::string> Validate() const;
};

FilterRuleSet FilterRuleSetFromJson(const Json& j);
Json ToJson(const FilterRuleSet& rules);

enum class EntryKind { kModel, kGarment };

struct CurationEntry {
  std::string id;
  std::string image_uri;
  EntryKind kind = EntryKind::kModel;
};

std::vector<CurationEntry> EntriesFromCatalog(const Catalog& catalog);

/// Append-only journal of per-stage outcomes keyed by (entry_id, stage).
/// Completed stages are looked up before any external call so a resumed run
/// repeats no work. Entry-level claims keep two workers off the same entry.
class CurationJournal {
 public:
  CurationJournal() = default;  // in-memory
  explicit CurationJournal(const std::string& path);

  std::optional<Json> Find(const std::string& entry_id, const std::string& stage) const;
  void Record(const std::string& entry_id, const std::string& stage, Json outcome);

  bool TryClaim(const std::string& entry_id);
  void Release(const std::string& entry_id);

  std::vector<Json> Records() const { return journal_.Records(); }

 private:
  Journal journal_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, Json> latest_;
  std::set<std::string> claimed_;
};

/// Folded view of one entry's journal history, stages in pipeline order.
struct CurationRecord {
  std::string entry_id;
  std::optional<Json> filter;
  std::optional<Json> tagging;
  std::optional<Json> anonymization;
};

std::vector<CurationRecord> BuildCurationRecords(const CurationJournal& journal);

struct FilterRejection {
  std::string entry_id;
  std::vector<std::string> failed_rules;
};

struct FilterPartition {
  std::vector<std::string> accepted;
  std::vector<FilterRejection> rejected;
  /// Entries whose analyzer call failed; retried on the next run.
  std::vector<std::string> undetermined;
};

/// Pure partition of `entries` (every entry lands in exactly one bucket).
/// Duplicates are judged against entries accepted earlier in input order.
FilterPartition ApplyFilters(std::span<const CurationEntry> entries, const FilterRuleSet& rules,
                             MediaAnalyzer& analyzer, CurationJournal* journal = nullptr);

struct TagProposal {
  enum class Status { kOk, kFailed };
  std::string entry_id;
  Status status = Status::kOk;
  TagMap original;  // untouched input labels
  TagMap proposed;  // covers every dimension; falls back to original when flagged
  std::map<std::string, double> confidence;
  std::set<std::string> needs_review;
  int retries = 0;
  std::string error;
};

Json ToJson(const TagProposal& p);

/// Asks the tagging VLM for a full label set. Expected response:
///   {"tags": {"<dimension>": {"value": "<label>", "confidence": 0.0-1.0}}}
/// Malformed output is retried up to `max_retries` times with a repair hint;
/// illegal or missing values flag only that dimension for review.
TagProposal RefineTags(const std::string& entry_id, const std::string& image_uri, EntryKind kind,
                       const TagMap& current, TaggingClient& tagger, const TagTaxonomy& taxonomy,
                       int max_retries = 2);

/// Tags every catalog entry whose filter stage passed (entries without a
/// journaled filter outcome are tagged too; journaled rejections are skipped).
/// Completed proposals are journaled under stage "tag" and reused on resume.
std::vector<TagProposal> RunTagging(const Catalog& catalog, TaggingClient& tagger,
                                    int max_retries = 2, CurationJournal* journal = nullptr);

struct FaceAttributes {
  int skin_tone = 3;  // ordinal 1..6
  Gender gender = Gender::kFemale;
  AgeGroup age_group = AgeGroup::kYouth;
};

struct SurrogateFace {
  std::string id;
  FaceAttributes attributes;
  std::string license_ref;
  std::string image_uri;
};

std::vector<SurrogateFace> LoadSurrogateBank(const std::string& path);

struct SurrogateWeights {
  double age = 0.5;
  double skin = 0.5;
};

inline constexpr int kSkinToneMin = 1;
inline constexpr int kSkinToneMax = 6;

/// Face attributes from a model image's labels (skin_tone tag required).
FaceAttributes FaceAttributesOf(const ModelImage& model);

/// Similarity score; nullopt when genders differ (hard constraint).
std::optional<double> SurrogateScore(const FaceAttributes& query, const FaceAttributes& candidate,
                                     const SurrogateWeights& weights = {});

/// Highest-scoring gender-matched surrogate, ties broken by ascending id.
/// Throws NoCandidateError when no surrogate shares the query's gender.
const SurrogateFace& MatchSurrogate(const FaceAttributes& query,
                                    std::span<const SurrogateFace> bank,
                                    const SurrogateWeights& weights = {});

struct AnonymizationConfig {
  int max_loops = 3;
  SurrogateWeights weights;
  std::size_t max_parallel = 4;
};

struct AnonymizationLoop {
  int attempt = 0;
  std::string swapped_uri;
  bool verified = false;
};

struct AnonymizationOutcome {
  std::string entry_id;
  AnonymizationStatus status = AnonymizationStatus::kPending;
  std::string surrogate_id;
  std::string swapped_uri;
  std::vector<AnonymizationLoop> history;
  std::string error;
};

Json ToJson(const AnonymizationOutcome& o);

/// Swap/verify loop per model image. Entries end `verified` or, after
/// `max_loops` failed verifications, `rejected`. Adapter failures leave the
/// entry `pending` so a later run can resume it. Entries already verified or
/// rejected pass through without calls.
std::vector<AnonymizationOutcome> RunAnonymization(std::span<const ModelImage> entries,
                                                   std::span<const SurrogateFace> bank,
                                                   FaceSwapper& swapper, SwapVerifier& verifier,
                                                   const AnonymizationConfig& config = {},
                                                   CurationJournal* journal = nullptr);

/// New catalog snapshot with anonymization statuses (and swapped image uris)
/// applied.
Catalog ApplyAnonymization(const Catalog& catalog, std::span<const AnonymizationOutcome> outcomes);

}  // namespace benchkit
