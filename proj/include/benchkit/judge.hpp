// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Two-call VLM judging protocol. Call one sees the person, every reference
// garment and the result, and scores identity consistency plus per-item
// garment fidelity. Call two sees only the person and the result, classifies
// the background, and scores background preservation and physical/structural
// logic; a flagged limb anomaly must survive a dedicated recheck call before
// it can lower the score. The per-sample overall score is the geometric mean
// of the four dimension scores.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "benchkit/adapters.hpp"
#include "benchkit/catalog.hpp"
#include "benchkit/generation.hpp"
#include "benchkit/jsonl.hpp"
#include "benchkit/pairing.hpp"

namespace benchkit {

enum class Dimension { kIdentity, kFidelity, kBackground, kPhysics };
template <>
struct EnumLabels<Dimension> {
  static constexpr auto kLabels = std::to_array<std::string_view>(
      {"identity_consistency", "garment_fidelity", "background_preservation",
       "physical_structural_logic"});
};

enum class BackgroundType { kPlain, kComplex };
template <>
struct EnumLabels<BackgroundType> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"plain", "complex"});
};

enum class FidelityAggregation { kMean, kMin };
template <>
struct EnumLabels<FidelityAggregation> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"mean", "min"});
};

enum class SampleStatus { kEvaluated, kMissing, kJudgeFailed, kPending };
template <>
struct EnumLabels<SampleStatus> {
  static constexpr auto kLabels =
      std::to_array<std::string_view>({"evaluated", "missing", "judge_failed", "pending"});
};

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 10;

struct DimensionScore {
  Dimension dimension = Dimension::kIdentity;
  double value = 0.0;  // integral for single judge calls; fidelity may aggregate
  std::string rationale;
};

struct FidelityItem {
  std::string garment_id;
  Category category = Category::kTop;
  int value = 0;
  std::string rationale;
};

/// One judge exchange, kept verbatim for auditing.
struct JudgeExchange {
  JudgeRequest request;
  std::string response;  // raw text, or the adapter error message
  std::string problem;   // why the response was rejected, empty when accepted
};

struct Stage1Result {
  DimensionScore identity;
  std::vector<FidelityItem> items;
  std::vector<JudgeExchange> exchanges;
};

struct Stage2Result {
  BackgroundType background_type = BackgroundType::kPlain;
  DimensionScore background;
  DimensionScore physics;
  bool limb_anomaly_flag = false;
  bool limb_recheck_performed = false;
  bool limb_anomaly_confirmed = false;
  std::vector<JudgeExchange> exchanges;
};

struct SampleEvaluation {
  std::string pair_id;
  std::string system_id;
  std::size_t item_count = 0;
  SampleStatus status = SampleStatus::kEvaluated;
  std::string reason;
  DimensionScore identity{Dimension::kIdentity, 0.0, {}};
  std::vector<FidelityItem> fidelity_items;
  DimensionScore fidelity{Dimension::kFidelity, 0.0, {}};
  DimensionScore background{Dimension::kBackground, 0.0, {}};
  BackgroundType background_type = BackgroundType::kPlain;
  DimensionScore physics{Dimension::kPhysics, 0.0, {}};
  bool limb_recheck_performed = false;
  double overall = 0.0;
  std::vector<JudgeExchange> transcripts;
};

Json ToJson(const SampleEvaluation& e);
SampleEvaluation SampleEvaluationFromJson(const Json& j);
std::vector<SampleEvaluation> LoadEvaluations(const std::string& path);

struct PromptTemplates {
  std::string version = "v1";
  std::string stage1;
  std::string stage2;
  std::string limb_recheck;
};

/// Built-in templates (identical to data/prompts/*.v1.txt).
PromptTemplates DefaultPromptTemplates();
/// Reads stage1.<version>.txt, stage2.<version>.txt, limb_recheck.<version>.txt.
PromptTemplates LoadPromptTemplates(const std::string& dir, const std::string& version = "v1");

/// Replaces every {{name}} with vars[name]; unknown names raise ConfigError.
std::string RenderTemplate(const std::string& tmpl, const std::map<std::string, std::string>& vars);

struct JudgeProtocolConfig {
  PromptTemplates templates = DefaultPromptTemplates();
  int max_parse_retries = 1;
  double temperature = 0.0;  // deterministic sampling directive
  FidelityAggregation fidelity_rule = FidelityAggregation::kMean;
  std::size_t max_parallel = 4;
};

struct JudgedGarment {
  std::string garment_id;
  Category category = Category::kTop;
  std::string image_uri;
};

struct Stage1Input {
  std::string pair_id;
  std::string person_uri;
  std::vector<JudgedGarment> garments;
  std::string result_uri;
};

/// Throws JudgeParseError once repair retries are spent, AdapterError when
/// the judge is unreachable.
Stage1Result EvaluateStage1(const Stage1Input& input, JudgeClient& judge,
                            const JudgeProtocolConfig& config);

/// The request carries only the person and result images.
Stage2Result EvaluateStage2(const std::string& pair_id, const std::string& person_uri,
                            const std::string& result_uri, JudgeClient& judge,
                            const JudgeProtocolConfig& config);

/// Fourth root of the product of the four aggregated scores.
double OverallScore(double identity, double fidelity, double background, double physics);

/// Per-item fidelity combined by `rule` (mean by default).
double AggregateFidelity(std::span<const FidelityItem> items, FidelityAggregation rule);

SampleEvaluation AggregateSample(const std::string& pair_id, const std::string& system_id,
                                 std::size_t item_count, const Stage1Result& stage1,
                                 const Stage2Result& stage2,
                                 FidelityAggregation rule = FidelityAggregation::kMean);

/// Both stages for one generated result. Missing/error results yield a
/// `missing` sample without any judge call.
SampleEvaluation EvaluateSample(const TryOnPair& pair, const GenerationResult* result,
                                const Catalog& catalog, JudgeClient& judge,
                                const JudgeProtocolConfig& config);

enum class Split { kAll, kSingle, kMulti };
template <>
struct EnumLabels<Split> {
  static constexpr auto kLabels = std::to_array<std::string_view>({"all", "single", "multi"});
};

bool InSplit(std::size_t item_count, Split split);

struct BenchmarkSummary {
  std::string system_id;
  Split split = Split::kAll;
  std::size_t n_pairs = 0;
  std::size_t n_evaluated = 0;
  std::size_t n_missing = 0;
  std::size_t n_judge_failed = 0;
  std::size_t n_pending = 0;
  bool comparable = false;  // false when nothing was evaluated
  double overall = 0.0;
  double identity = 0.0;
  double fidelity = 0.0;
  double background = 0.0;
  double physics = 0.0;
};

Json ToJson(const BenchmarkSummary& s);

/// Arithmetic means of per-sample values over evaluated samples only.
BenchmarkSummary SummarizeEvaluations(const std::string& system_id,
                                      std::span<const SampleEvaluation> samples,
                                      Split split = Split::kAll);

struct BenchmarkEvaluation {
  std::vector<SampleEvaluation> samples;  // pair order
  BenchmarkSummary summary;
};

/// Judges every pair's result for one system. A journal makes the batch
/// resumable: pairs with a journaled non-pending evaluation are not re-judged.
BenchmarkEvaluation EvaluateBenchmark(std::span<const TryOnPair> pairs,
                                      std::span<const GenerationResult> results,
                                      const std::string& system_id, const Catalog& catalog,
                                      JudgeClient& judge, const JudgeProtocolConfig& config = {},
                                      Journal* journal = nullptr);

}  // namespace benchkit
