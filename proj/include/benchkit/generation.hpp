// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "benchkit/adapters.hpp"
#include "benchkit/catalog.hpp"
#include "benchkit/jsonl.hpp"
#include "benchkit/pairing.hpp"

namespace benchkit {

/// Items in prompt order: OUTER, TOP/DRESS, BOTTOM, SHOES, HAT, BAG. The
/// generator receives garment images in this same order.
std::vector<PairItem> PromptOrder(const TryOnPair& pair);

/// Deterministic instruction text for one pair. Names every item by category
/// and slot, appends layer directives verbatim, and ends with fixed
/// preservation clauses.
std::string BuildPrompt(const TryOnPair& pair, const Catalog& catalog);

GenerationRequest BuildGenerationRequest(const TryOnPair& pair, const Catalog& catalog);

enum class GenerationStatus { kOk, kMissing, kError };
template <>
struct EnumLabels<GenerationStatus> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"ok", "missing", "error"});
};

struct GenerationResult {
  std::string pair_id;
  std::string system_id;
  GenerationStatus status = GenerationStatus::kMissing;
  std::string image_uri;  // set iff ok
  std::string reason;     // set for missing / error
  double wall_latency_s = 0.0;
  std::optional<double> server_time_s;
  int attempt_count = 0;
  std::size_t ref_image_count = 0;
};

Json ToJson(const GenerationResult& r);
GenerationResult GenerationResultFromJson(const Json& j);
std::vector<GenerationResult> LoadGenerationResults(const std::string& path);

struct RetryPolicy {
  int max_retries = 2;
  double backoff_initial_s = 1.0;
  double backoff_multiplier = 2.0;
};

struct GenerationOptions {
  RetryPolicy retry;
  std::size_t max_parallel = 4;
  std::string image_dir;  // where returned image bytes are stored
};

/// Exactly one result per pair, in pair order. Transport failures are retried
/// with exponential backoff; a refusal is terminal `missing` at once, and
/// exhausted retries also end `missing`. With a journal, pairs that already
/// have a journaled result for this system are not sent again.
std::vector<GenerationResult> RunGeneration(std::span<const TryOnPair> pairs,
                                            const Catalog& catalog, Generator& generator,
                                            const std::string& system_id,
                                            const GenerationOptions& options = {},
                                            Journal* journal = nullptr);

struct LatencySample {
  std::string pair_id;
  std::size_t ref_image_count = 0;
  int repeat = 0;  // -1 for warm-up calls
  double wall_s = 0.0;
  std::optional<double> server_s;
  bool ok = true;
  std::string error;
};

Json ToJson(const LatencySample& s);
LatencySample LatencySampleFromJson(const Json& j);

struct LatencyBucket {
  std::size_t ref_image_count = 0;
  std::size_t n = 0;  // pairs timed
  double mean_s = 0.0;
  double p50_s = 0.0;
  double p95_s = 0.0;
  std::optional<double> server_mean_s;
};

struct LatencySummary {
  std::string system_id;
  std::vector<LatencyBucket> buckets;  // ascending ref_image_count
  std::size_t failed_calls = 0;
  std::vector<std::string> failed_pairs;  // no successful timed repeat

  const LatencyBucket* Find(std::size_t ref_image_count) const;
};

Json ToJson(const LatencySummary& s);

/// Linear-interpolated percentile (q in [0, 1]) of an unsorted sample.
double Percentile(std::vector<double> values, double q);

/// Pure reduction from raw samples: warm-ups dropped, per-pair latency =
/// median of its successful repeats, then bucketed by reference-image count.
LatencySummary SummarizeLatency(const std::string& system_id,
                                std::span<const LatencySample> samples);

struct LatencyOptions {
  std::size_t warmup = 2;   // calls cycled over the pairs before timing
  std::size_t repeats = 3;  // timed calls per pair
};

struct LatencyRun {
  std::vector<LatencySample> samples;
  LatencySummary summary;
};

/// Sequential timing run (parallelism fixed at 1). Every raw sample,
/// including warm-ups, is appended to the journal when one is given.
LatencyRun RunLatencyBench(std::span<const TryOnPair> pairs, const Catalog& catalog,
                           Generator& generator, const std::string& system_id,
                           const LatencyOptions& options = {}, Journal* journal = nullptr);

}  // namespace benchkit
