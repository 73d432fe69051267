// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/report.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

std::string SplitTitle(Split split) {
  switch (split) {
    case Split::kSingle: return "Single-garment";
    case Split::kMulti: return "Multi-garment";
    case Split::kAll: return "All pairs";
  }
  return {};
}

std::string Decorate(const std::string& text, Mark m) {
  switch (m) {
    case Mark::kBest: return "**" + text + "**";
    case Mark::kSecond: return "<u>" + text + "</u>";
    case Mark::kNone: break;
  }
  return text;
}

std::string_view MarkLabel(Mark m) {
  switch (m) {
    case Mark::kBest: return "best";
    case Mark::kSecond: return "second";
    case Mark::kNone: break;
  }
  return "none";
}

std::string Pct(double v) { return FormatFixed(v, 1) + "%"; }

void DistributionTable(std::ostringstream& os, const Distribution& d) {
  os << "| " << d.dimension << " | count | share |\n|---|---:|---:|\n";
  for (const auto& r : d.rows) {
    os << "| " << r.label << " | " << r.count << " | " << Pct(r.percent) << " |\n";
  }
  os << '\n';
}

}  // namespace

Leaderboard BuildLeaderboard(std::span<const BenchmarkSummary> summaries, Split split) {
  Leaderboard board;
  board.split = split;
  for (const auto& s : summaries) {
    if (s.split != split) continue;
    LeaderboardRow row;
    row.system_id = s.system_id;
    row.comparable = s.comparable;
    if (s.comparable) {
      row.values = {RoundHalfUp(s.overall, 3), RoundHalfUp(s.identity, 3),
                    RoundHalfUp(s.fidelity, 3), RoundHalfUp(s.background, 3),
                    RoundHalfUp(s.physics, 3)};
    }
    row.n_pairs = s.n_pairs;
    row.n_evaluated = s.n_evaluated;
    row.n_missing = s.n_missing;
    row.n_judge_failed = s.n_judge_failed;
    row.n_pending = s.n_pending;
    row.footnote = s.n_missing > 0;
    board.rows.push_back(std::move(row));
  }
  std::sort(board.rows.begin(), board.rows.end(), [](const auto& a, const auto& b) {
    if (a.comparable != b.comparable) return a.comparable;
    if (a.overall() != b.overall()) return a.overall() > b.overall();
    return a.system_id < b.system_id;
  });
  for (std::size_t c = 0; c < kLeaderboardColumns; ++c) {
    std::set<double, std::greater<>> distinct;
    for (const auto& r : board.rows) {
      if (r.comparable) distinct.insert(r.values[c]);
    }
    auto it = distinct.begin();
    const std::optional<double> best =
        it != distinct.end() ? std::optional<double>(*it++) : std::nullopt;
    const std::optional<double> second =
        it != distinct.end() ? std::optional<double>(*it) : std::nullopt;
    for (auto& r : board.rows) {
      if (!r.comparable) continue;
      if (best && r.values[c] == *best) r.marks[c] = Mark::kBest;
      else if (second && r.values[c] == *second) r.marks[c] = Mark::kSecond;
    }
  }
  return board;
}

std::string RenderLeaderboardMarkdown(const Leaderboard& board) {
  std::ostringstream os;
  os << "| system | overall | identity | garment fidelity | background | physical logic | n |\n"
     << "|---|---:|---:|---:|---:|---:|---:|\n";
  bool any_footnote = false;
  for (const auto& r : board.rows) {
    os << "| " << r.system_id << (r.footnote ? "*" : "") << " |";
    for (std::size_t c = 0; c < kLeaderboardColumns; ++c) {
      os << ' ' << (r.comparable ? Decorate(FormatFixed(r.values[c], 3), r.marks[c]) : "n/a")
         << " |";
    }
    os << ' ' << r.n_evaluated << " |\n";
    any_footnote = any_footnote || r.footnote;
  }
  if (any_footnote) {
    os << '\n';
    for (const auto& r : board.rows) {
      if (!r.footnote) continue;
      os << "\\* " << r.system_id << " produced no result for " << r.n_missing << " of "
         << r.n_pairs << " pairs; those pairs are excluded and scores average the remaining "
         << r.n_evaluated << ".\n";
    }
  }
  for (const auto& r : board.rows) {
    if (r.n_judge_failed + r.n_pending == 0) continue;
    os << "\n" << r.system_id << ": " << r.n_judge_failed << " judge_failed, " << r.n_pending
       << " pending (excluded).\n";
  }
  return os.str();
}

Json ToJson(const Leaderboard& board) {
  Json rows = Json::array();
  for (const auto& r : board.rows) {
    Json j{{"system_id", r.system_id},
           {"comparable", r.comparable},
           {"n_pairs", r.n_pairs},
           {"n_evaluated", r.n_evaluated},
           {"n_missing", r.n_missing},
           {"n_judge_failed", r.n_judge_failed},
           {"n_pending", r.n_pending},
           {"footnote", r.footnote}};
    if (r.comparable) {
      for (std::size_t c = 0; c < kLeaderboardColumns; ++c) {
        const std::string name(kLeaderboardColumnNames[c]);
        j[name] = r.values[c];
        j["marks"][name] = MarkLabel(r.marks[c]);
      }
    }
    rows.push_back(std::move(j));
  }
  return Json{{"split", ToString(board.split)}, {"rows", rows}};
}

std::string_view CategoryPlural(Category c) {
  switch (c) {
    case Category::kTop: return "tops";
    case Category::kPants: return "pants";
    case Category::kSkirt: return "skirts";
    case Category::kDress: return "dresses";
    case Category::kCoat: return "coats";
    case Category::kShoes: return "shoes";
    case Category::kBag: return "bags";
    case Category::kHat: return "hats";
  }
  return "";
}

std::string RenderStatsMarkdown(const StatsReport& stats) {
  std::ostringstream os;
  os << "Models: " << stats.model_count << ", garments: " << stats.garment_count
     << ", subcategories: " << stats.subcategory_total << "\n\n";
  os << "| category | items | styles |\n|---|---:|---:|\n";
  for (const auto& c : stats.categories) {
    os << "| " << CategoryPlural(c.category) << " | " << c.items << " | " << c.subcategories
       << " |\n";
  }
  os << '\n';
  for (const auto& c : stats.categories) {
    os << "- " << CategoryPlural(c.category) << ": " << c.subcategories << " styles\n";
  }
  os << '\n';
  for (const auto& d : stats.model_distributions) DistributionTable(os, d);
  if (const auto* bg = stats.FindDistribution("background_complexity"); bg && bg->total > 0) {
    const double share = stats.Percent("background_complexity", "complex");
    os << "Complex backgrounds: " << Pct(share)
       << (share > kComplexBackgroundThreshold ? " (>40%)" : " (not above 40%)") << "\n";
  }
  return os.str();
}

std::string RenderLatencyMarkdown(std::span<const LatencySummary> latency) {
  std::ostringstream os;
  os << "| system | reference images | n | mean s | p50 s | p95 s | server mean s |\n"
     << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& s : latency) {
    for (const auto& b : s.buckets) {
      os << "| " << s.system_id << " | " << b.ref_image_count << " | " << b.n << " | "
         << FormatFixed(b.mean_s, 2) << " | " << FormatFixed(b.p50_s, 2) << " | "
         << FormatFixed(b.p95_s, 2) << " | "
         << (b.server_mean_s ? FormatFixed(*b.server_mean_s, 2) : std::string("-")) << " |\n";
    }
  }
  for (const auto& s : latency) {
    if (s.failed_calls > 0) {
      os << "\n" << s.system_id << ": " << s.failed_calls << " failed calls excluded from timing.\n";
    }
  }
  return os.str();
}

std::string RenderGsbMarkdown(const GsbSummary& gsb) {
  std::ostringstream os;
  os << "Reference system: " << gsb.reference_system << "\n\n"
     << "| opponent | garments | n | good | same | bad |\n|---|---|---:|---:|---:|---:|\n";
  for (const auto& c : gsb.comparisons) {
    auto line = [&](const GsbRow& r) {
      os << "| " << c.opponent << " | "
         << (r.garment_count == 0 ? std::string("overall") : std::to_string(r.garment_count))
         << " | " << r.n << " | " << Pct(r.win_pct) << " | " << Pct(r.same_pct) << " | "
         << Pct(r.loss_pct) << " |\n";
    };
    for (const auto& r : c.buckets) line(r);
    line(c.overall);
  }
  return os.str();
}

Json ToJson(const Provenance& p) {
  return Json{{"tool_version", p.tool_version},
              {"config_hashes", p.config_hashes},
              {"input_hashes", p.input_hashes},
              {"seeds", p.seeds},
              {"adapter_versions", p.adapter_versions},
              {"prompt_versions", p.prompt_versions}};
}

std::string RenderBundleMarkdown(const ReportBundle& b) {
  std::ostringstream os;
  os << "# Benchmark report\n\n";
  for (Split split : {Split::kSingle, Split::kMulti}) {
    os << "## Leaderboard: " << SplitTitle(split) << "\n\n";
    const auto board = BuildLeaderboard(b.summaries, split);
    if (board.rows.empty()) os << "_" << kNotRun << "_\n\n";
    else os << RenderLeaderboardMarkdown(board) << '\n';
  }
  os << "## Benchmark statistics\n\n";
  if (b.stats) os << RenderStatsMarkdown(*b.stats) << '\n';
  else os << "_" << kNotRun << "_\n\n";
  os << "## Latency\n\n";
  if (b.latency) os << RenderLatencyMarkdown(*b.latency) << '\n';
  else os << "_" << kNotRun << "_\n\n";
  os << "## GSB\n\n";
  if (b.gsb) os << RenderGsbMarkdown(*b.gsb) << '\n';
  else os << "_" << kNotRun << "_\n\n";
  os << "## Provenance\n\n```json\n" << ToJson(b.provenance).dump(2) << "\n```\n";
  return os.str();
}

Json BundleToJson(const ReportBundle& b) {
  const Json not_run{{"status", kNotRun}};
  Json boards = Json::object();
  for (Split split : {Split::kSingle, Split::kMulti}) {
    const auto board = BuildLeaderboard(b.summaries, split);
    boards[std::string(ToString(split))] = board.rows.empty() ? not_run : ToJson(board);
  }
  Json latency = not_run;
  if (b.latency) {
    latency = Json::array();
    for (const auto& s : *b.latency) latency.push_back(ToJson(s));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"leaderboards", boards},
              {"stats", b.stats ? ToJson(*b.stats) : not_run},
              {"latency", latency},
              {"gsb", b.gsb ? ToJson(*b.gsb) : not_run},
              {"provenance", ToJson(b.provenance)}};
}

std::vector<std::string> ExportBundle(const ReportBundle& bundle, const std::string& out_dir,
                                      std::span<const ReportFormat> formats) {
  if (bundle.provenance.tool_version.empty()) {
    throw ConfigError("report bundle has no provenance");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  std::vector<std::string> paths;
  for (auto f : formats) {
    if (f == ReportFormat::kMarkdown) {
      paths.push_back((std::filesystem::path(out_dir) / "report.md").string());
      WriteFile(paths.back(), RenderBundleMarkdown(bundle));
    } else {
      paths.push_back((std::filesystem::path(out_dir) / "report.json").string());
      WriteFile(paths.back(), BundleToJson(bundle).dump(2) + "\n");
    }
  }
  return paths;
}

std::vector<ReportFormat> ParseReportFormats(const std::string& list) {
  std::vector<ReportFormat> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ReportFormat f;
    if (item == "md" || item == "markdown") f = ReportFormat::kMarkdown;
    else if (item == "structured" || item == "json") f = ReportFormat::kJson;
    else throw ConfigError("unknown report format '" + item + "'");
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  if (out.empty()) throw ConfigError("no report format given");
  return out;
}

}  // namespace benchkit
