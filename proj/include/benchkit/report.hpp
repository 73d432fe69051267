// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Rendering of leaderboards, catalog statistics, latency tables and GSB
// summaries. Renderers only format the numbers they are given.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "benchkit/catalog.hpp"
#include "benchkit/generation.hpp"
#include "benchkit/gsb.hpp"
#include "benchkit/judge.hpp"

namespace benchkit {

enum class Mark { kNone, kBest, kSecond };

inline constexpr std::size_t kLeaderboardColumns = 5;
inline constexpr std::array<std::string_view, kLeaderboardColumns> kLeaderboardColumnNames{
    "overall", "identity", "fidelity", "background", "physics"};

struct LeaderboardRow {
  std::string system_id;
  bool comparable = false;
  std::array<double, kLeaderboardColumns> values{};  // 3-decimal half-up
  std::array<Mark, kLeaderboardColumns> marks{};
  std::size_t n_pairs = 0;
  std::size_t n_evaluated = 0;
  std::size_t n_missing = 0;
  std::size_t n_judge_failed = 0;
  std::size_t n_pending = 0;
  bool footnote = false;  // n_missing > 0

  double overall() const { return values[0]; }
};

struct Leaderboard {
  Split split = Split::kSingle;
  std::vector<LeaderboardRow> rows;  // overall desc, ties by system_id
};

/// Rows for the summaries whose split matches. Values are rounded to three
/// decimals first; marks then flag the largest and second-largest rounded
/// value of each column (all tied rows share a mark).
Leaderboard BuildLeaderboard(std::span<const BenchmarkSummary> summaries, Split split);

std::string RenderLeaderboardMarkdown(const Leaderboard& board);
Json ToJson(const Leaderboard& board);

/// "dresses", "pants", ... as used in the distribution report.
std::string_view CategoryPlural(Category c);

inline constexpr double kComplexBackgroundThreshold = 40.0;

std::string RenderStatsMarkdown(const StatsReport& stats);

std::string RenderLatencyMarkdown(std::span<const LatencySummary> latency);
std::string RenderGsbMarkdown(const GsbSummary& gsb);

struct Provenance {
  std::string tool_version;
  std::map<std::string, std::string> config_hashes;     // name -> sha256
  std::map<std::string, std::string> input_hashes;      // name -> sha256
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> adapter_versions;  // role -> spec/version
  std::map<std::string, std::string> prompt_versions;
};

Json ToJson(const Provenance& p);

struct ReportBundle {
  std::vector<BenchmarkSummary> summaries;  // any splits; single and multi are rendered
  std::optional<StatsReport> stats;
  std::optional<std::vector<LatencySummary>> latency;
  std::optional<GsbSummary> gsb;
  Provenance provenance;
};

inline constexpr std::string_view kNotRun = "not run";

std::string RenderBundleMarkdown(const ReportBundle& bundle);
Json BundleToJson(const ReportBundle& bundle);

enum class ReportFormat { kMarkdown, kJson };

/// Writes report.md and/or report.json into `out_dir` and returns the paths.
std::vector<std::string> ExportBundle(const ReportBundle& bundle, const std::string& out_dir,
                                      std::span<const ReportFormat> formats);

/// Parses "md,structured" style lists; "json" is accepted for "structured".
std::vector<ReportFormat> ParseReportFormats(const std::string& list);

}  // namespace benchkit
