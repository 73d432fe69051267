// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/generation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <thread>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

int PromptRank(Slot s) {
  switch (s) {
    case Slot::kOuter: return 0;
    case Slot::kTop:
    case Slot::kDress: return 1;
    case Slot::kBottom: return 2;
    case Slot::kShoes: return 3;
    case Slot::kHat: return 4;
    case Slot::kBag: return 5;
  }
  return 6;
}

const GarmentItem& GarmentOrThrow(const Catalog& catalog, const std::string& id) {
  const auto* g = catalog.FindGarment(id);
  if (g == nullptr) throw UnknownIdError(id);
  return *g;
}

}  // namespace

std::vector<PairItem> PromptOrder(const TryOnPair& pair) {
  std::vector<PairItem> items = pair.items;
  std::stable_sort(items.begin(), items.end(), [](const PairItem& a, const PairItem& b) {
    return PromptRank(a.slot) < PromptRank(b.slot);
  });
  return items;
}

std::string BuildPrompt(const TryOnPair& pair, const Catalog& catalog) {
  const auto items = PromptOrder(pair);
  std::string out = "Virtual try-on. Image 1 is the person. Dress the person in ";
  out += items.size() == 1 ? "the following item" : "all of the following items";
  out += ", each shown in its own reference image:\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& g = GarmentOrThrow(catalog, items[i].garment_id);
    out += std::to_string(i + 1) + ". " + std::string(ToString(g.category)) + " (" +
           g.subcategory + ") in slot " + std::string(ToString(items[i].slot)) +
           ", reference image " + std::to_string(i + 2);
    if (!items[i].layer_directive.empty()) out += "; " + items[i].layer_directive;
    out += ".\n";
  }
  out +=
      "Keep the person's identity, face and body shape unchanged. "
      "Keep the pose unchanged. "
      "Keep the background and lighting unchanged.";
  return out;
}

GenerationRequest BuildGenerationRequest(const TryOnPair& pair, const Catalog& catalog) {
  const auto* model = catalog.FindModel(pair.model_image_id);
  if (model == nullptr) throw UnknownIdError(pair.model_image_id);
  GenerationRequest req;
  req.pair_id = pair.pair_id;
  req.prompt = BuildPrompt(pair, catalog);
  req.person_image = model->image_uri;
  for (const auto& item : PromptOrder(pair)) {
    req.garment_images.push_back(GarmentOrThrow(catalog, item.garment_id).image_uri);
  }
  return req;
}

// ---------------------------------------------------------------------------

Json ToJson(const GenerationResult& r) {
  Json j{{"schema_version", kSchemaVersion},
         {"pair_id", r.pair_id},
         {"system_id", r.system_id},
         {"status", ToString(r.status)},
         {"wall_latency_s", r.wall_latency_s},
         {"attempt_count", r.attempt_count},
         {"ref_image_count", r.ref_image_count}};
  if (!r.image_uri.empty()) j["image_uri"] = r.image_uri;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.server_time_s) j["server_time_s"] = *r.server_time_s;
  return j;
}

GenerationResult GenerationResultFromJson(const Json& j) {
  GenerationResult r;
  r.pair_id = j.at("pair_id").get<std::string>();
  r.system_id = j.at("system_id").get<std::string>();
  auto status = ParseEnum<GenerationStatus>(j.at("status").get<std::string>());
  if (!status) throw ValidationError(r.pair_id, "unknown generation status");
  r.status = *status;
  r.image_uri = j.value("image_uri", "");
  r.reason = j.value("reason", "");
  r.wall_latency_s = j.value("wall_latency_s", 0.0);
  if (j.contains("server_time_s")) r.server_time_s = j["server_time_s"].get<double>();
  r.attempt_count = j.value("attempt_count", 0);
  r.ref_image_count = j.value("ref_image_count", std::size_t{0});
  if (r.status == GenerationStatus::kOk && r.image_uri.empty()) {
    throw ValidationError(r.pair_id, "ok result without image_uri");
  }
  return r;
}

std::vector<GenerationResult> LoadGenerationResults(const std::string& path) {
  std::vector<GenerationResult> out;
  ForEachJsonLine(path, [&](const Json& j, std::size_t line) {
    try {
      out.push_back(GenerationResultFromJson(j));
    } catch (const Json::exception& e) {
      throw ParseError(path, line, e.what());
    }
  });
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GenerationResult GenerateOne(const TryOnPair& pair, const Catalog& catalog, Generator& generator,
                             const std::string& system_id, const GenerationOptions& options) {
  GenerationResult r;
  r.pair_id = pair.pair_id;
  r.system_id = system_id;
  r.ref_image_count = pair.ref_image_count();
  const GenerationRequest req = BuildGenerationRequest(pair, catalog);
  double backoff = options.retry.backoff_initial_s;
  std::string last_error;
  for (int attempt = 1; attempt <= options.retry.max_retries + 1; ++attempt) {
    r.attempt_count = attempt;
    const auto start = Clock::now();
    try {
      GenerationResponse resp = generator.Generate(req);
      r.wall_latency_s = SecondsSince(start);
      r.server_time_s = resp.server_time_s;
      if (resp.kind == GenerationResponse::Kind::kRefusal) {
        r.status = GenerationStatus::kMissing;
        r.reason = "refusal: " + resp.refusal_reason;
        return r;
      }
      if (!resp.image_bytes.empty() && !options.image_dir.empty()) {
        std::filesystem::create_directories(options.image_dir);
        const auto path = (std::filesystem::path(options.image_dir) /
                           (Sha256Hex(resp.image_bytes) + ".img"))
                              .string();
        WriteFile(path, resp.image_bytes);
        r.image_uri = path;
      } else {
        r.image_uri = resp.image_uri;
      }
      if (r.image_uri.empty()) {
        r.status = GenerationStatus::kError;
        r.reason = "response carried no image";
        return r;
      }
      r.status = GenerationStatus::kOk;
      return r;
    } catch (const AdapterError& e) {
      r.wall_latency_s = SecondsSince(start);
      last_error = e.what();
    }
    if (attempt <= options.retry.max_retries && backoff > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= options.retry.backoff_multiplier;
    }
  }
  r.status = GenerationStatus::kMissing;
  r.reason = "retries exhausted: " + last_error;
  return r;
}

}  // namespace

std::vector<GenerationResult> RunGeneration(std::span<const TryOnPair> pairs,
                                            const Catalog& catalog, Generator& generator,
                                            const std::string& system_id,
                                            const GenerationOptions& options, Journal* journal) {
  if (options.retry.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (system_id.empty()) throw ConfigError("system_id must not be empty");
  // Fail fast on unknown ids before any call goes out.
  for (const auto& p : pairs) (void)BuildGenerationRequest(p, catalog);

  std::map<std::string, GenerationResult> done;
  if (journal != nullptr) {
    for (const auto& rec : journal->Records()) {
      if (rec.value("system_id", "") != system_id) continue;
      auto r = GenerationResultFromJson(rec);
      done[r.pair_id] = std::move(r);
    }
  }
  std::vector<GenerationResult> out(pairs.size());
  ParallelFor(pairs.size(), options.max_parallel, [&](std::size_t i) {
    if (auto it = done.find(pairs[i].pair_id); it != done.end()) {
      out[i] = it->second;
      return;
    }
    out[i] = GenerateOne(pairs[i], catalog, generator, system_id, options);
    if (journal != nullptr) journal->Append(ToJson(out[i]));
  });
  return out;
}

// ---------------------------------------------------------------------------

Json ToJson(const LatencySample& s) {
  Json j{{"pair_id", s.pair_id}, {"ref_image_count", s.ref_image_count}, {"repeat", s.repeat},
         {"wall_s", s.wall_s},   {"ok", s.ok}};
  if (s.server_s) j["server_s"] = *s.server_s;
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

LatencySample LatencySampleFromJson(const Json& j) {
  LatencySample s;
  s.pair_id = j.at("pair_id").get<std::string>();
  s.ref_image_count = j.at("ref_image_count").get<std::size_t>();
  s.repeat = j.at("repeat").get<int>();
  s.wall_s = j.at("wall_s").get<double>();
  if (j.contains("server_s")) s.server_s = j["server_s"].get<double>();
  s.ok = j.at("ok").get<bool>();
  s.error = j.value("error", "");
  return s;
}

const LatencyBucket* LatencySummary::Find(std::size_t ref_image_count) const {
  for (const auto& b : buckets) {
    if (b.ref_image_count == ref_image_count) return &b;
  }
  return nullptr;
}

Json ToJson(const LatencySummary& s) {
  Json buckets = Json::array();
  for (const auto& b : s.buckets) {
    Json j{{"ref_image_count", b.ref_image_count},
           {"item_count", b.ref_image_count - 1},
           {"n", b.n},
           {"mean_s", b.mean_s},
           {"p50_s", b.p50_s},
           {"p95_s", b.p95_s}};
    if (b.server_mean_s) j["server_mean_s"] = *b.server_mean_s;
    buckets.push_back(std::move(j));
  }
  return Json{{"system_id", s.system_id},
              {"buckets", buckets},
              {"failed_calls", s.failed_calls},
              {"failed_pairs", s.failed_pairs}};
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

LatencySummary SummarizeLatency(const std::string& system_id,
                                std::span<const LatencySample> samples) {
  LatencySummary out;
  out.system_id = system_id;
  struct PairSamples {
    std::size_t refs = 0;
    std::vector<double> wall;
    std::vector<double> server;
  };
  std::vector<std::string> order;
  std::map<std::string, PairSamples> per_pair;
  for (const auto& s : samples) {
    if (s.repeat < 0) continue;
    auto [it, inserted] = per_pair.try_emplace(s.pair_id);
    if (inserted) order.push_back(s.pair_id);
    it->second.refs = s.ref_image_count;
    if (!s.ok) {
      ++out.failed_calls;
      continue;
    }
    it->second.wall.push_back(s.wall_s);
    if (s.server_s) it->second.server.push_back(*s.server_s);
  }
  std::map<std::size_t, std::vector<double>> bucket_wall;
  std::map<std::size_t, std::vector<double>> bucket_server;
  for (const auto& id : order) {
    const auto& ps = per_pair[id];
    if (ps.wall.empty()) {
      out.failed_pairs.push_back(id);
      continue;
    }
    bucket_wall[ps.refs].push_back(Percentile(ps.wall, 0.5));
    if (!ps.server.empty()) bucket_server[ps.refs].push_back(Percentile(ps.server, 0.5));
  }
  for (const auto& [refs, values] : bucket_wall) {
    LatencyBucket b;
    b.ref_image_count = refs;
    b.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    b.mean_s = sum / static_cast<double>(values.size());
    b.p50_s = Percentile(values, 0.5);
    b.p95_s = Percentile(values, 0.95);
    if (auto it = bucket_server.find(refs); it != bucket_server.end()) {
      double ssum = 0.0;
      for (double v : it->second) ssum += v;
      b.server_mean_s = ssum / static_cast<double>(it->second.size());
    }
    out.buckets.push_back(b);
  }
  return out;
}

LatencyRun RunLatencyBench(std::span<const TryOnPair> pairs, const Catalog& catalog,
                           Generator& generator, const std::string& system_id,
                           const LatencyOptions& options, Journal* journal) {
  if (options.repeats < 1) throw ConfigError("repeats must be >= 1");
  std::vector<GenerationRequest> requests;
  for (const auto& p : pairs) requests.push_back(BuildGenerationRequest(p, catalog));

  LatencyRun run;
  auto timed_call = [&](std::size_t i, int repeat) {
    LatencySample s;
    s.pair_id = pairs[i].pair_id;
    s.ref_image_count = pairs[i].ref_image_count();
    s.repeat = repeat;
    const auto start = Clock::now();
    try {
      auto resp = generator.Generate(requests[i]);
      s.wall_s = SecondsSince(start);
      s.server_s = resp.server_time_s;
      if (resp.kind == GenerationResponse::Kind::kRefusal) {
        s.ok = false;
        s.error = "refusal: " + resp.refusal_reason;
      }
    } catch (const AdapterError& e) {
      s.wall_s = SecondsSince(start);
      s.ok = false;
      s.error = e.what();
    }
    if (journal != nullptr) {
      Json rec = ToJson(s);
      rec["system_id"] = system_id;
      journal->Append(rec);
    }
    run.samples.push_back(std::move(s));
  };
  if (!pairs.empty()) {
    for (std::size_t w = 0; w < options.warmup; ++w) timed_call(w % pairs.size(), -1);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t r = 0; r < options.repeats; ++r) timed_call(i, static_cast<int>(r));
  }
  run.summary = SummarizeLatency(system_id, run.samples);
  return run;
}

}  // namespace benchkit
