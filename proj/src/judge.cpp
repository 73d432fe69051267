// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/judge.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

#include "prompt_templates.inc"

constexpr const char* kStage1 = "stage1";
constexpr const char* kStage2 = "stage2";
constexpr const char* kLimbRecheck = "limb_recheck";

/// Extracts {"score": int 1..10, "rationale": string}; returns a problem
/// description or empty on success.
std::string ReadScore(const Json& j, const std::string& where, int& score, std::string& rationale) {
  if (!j.is_object()) return where + " must be an object";
  auto s = j.find("score");
  if (s == j.end() || !s->is_number_integer()) return where + ".score must be an integer";
  const auto v = s->get<long long>();
  if (v < kLikertMin || v > kLikertMax) {
    return where + ".score " + std::to_string(v) + " outside 1..10";
  }
  auto r = j.find("rationale");
  if (r == j.end() || !r->is_string()) return where + ".rationale must be a string";
  score = static_cast<int>(v);
  rationale = r->get<std::string>();
  return {};
}

/// Sends `request` and hands the parsed reply to `accept`, which returns an
/// empty string on success or a description of the schema problem. Invalid
/// replies are retried with the problem appended to the prompt.
void CallWithRepair(JudgeClient& judge, JudgeRequest request, int max_retries,
                    std::vector<JudgeExchange>& exchanges,
                    const std::function<std::string(const Json&)>& accept) {
  const std::string base_prompt = request.prompt;
  std::string problem;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    request.attempt = attempt;
    if (attempt > 0) {
      request.prompt = base_prompt + "\n\nYour previous reply was rejected: " + problem +
                       ". Reply again with only the JSON object described above.";
    }
    JudgeExchange ex{request, {}, {}};
    try {
      ex.response = judge.Complete(request);
    } catch (const AdapterError& e) {
      ex.response = e.what();
      ex.problem = "adapter error";
      exchanges.push_back(std::move(ex));
      throw;
    }
    const Json parsed = Json::parse(ex.response, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      problem = "reply is not a JSON object";
    } else {
      problem = accept(parsed);
    }
    ex.problem = problem;
    exchanges.push_back(std::move(ex));
    if (problem.empty()) return;
  }
  throw JudgeParseError(request.stage + " for " + request.pair_id + ": " + problem + " (after " +
                        std::to_string(max_retries) + " repair retries)");
}

Json ExchangesToJson(const std::vector<JudgeExchange>& exchanges) {
  Json arr = Json::array();
  for (const auto& ex : exchanges) {
    Json j{{"request", ToJson(ex.request)}, {"response", ex.response}};
    if (!ex.problem.empty()) j["problem"] = ex.problem;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<JudgeExchange> ExchangesFromJson(const Json& arr) {
  std::vector<JudgeExchange> out;
  for (const auto& j : arr) {
    JudgeExchange ex;
    const Json& r = j.at("request");
    ex.request.stage = r.value("stage", "");
    ex.request.pair_id = r.value("pair_id", "");
    ex.request.prompt = r.value("prompt", "");
    ex.request.temperature = r.value("temperature", 0.0);
    ex.request.attempt = r.value("attempt", 0);
    for (const auto& im : r.value("images", Json::array())) {
      ex.request.images.push_back(
          {im.value("role", ""), im.value("uri", ""), im.value("garment_id", "")});
    }
    ex.response = j.value("response", "");
    ex.problem = j.value("problem", "");
    out.push_back(std::move(ex));
  }
  return out;
}

Json ScoreToJson(const DimensionScore& s) {
  return Json{{"dimension", ToString(s.dimension)}, {"value", s.value}, {"rationale", s.rationale}};
}

DimensionScore ScoreFromJson(const Json& j, Dimension d) {
  return DimensionScore{d, j.value("value", 0.0), j.value("rationale", "")};
}

}  // namespace

// ---------------------------------------------------------------------------

PromptTemplates DefaultPromptTemplates() {
  return PromptTemplates{"v1", kPrompt_stage1, kPrompt_stage2, kPrompt_limb_recheck};
}

PromptTemplates LoadPromptTemplates(const std::string& dir, const std::string& version) {
  const std::filesystem::path base(dir);
  PromptTemplates t;
  t.version = version;
  t.stage1 = ReadFile((base / ("stage1." + version + ".txt")).string());
  t.stage2 = ReadFile((base / ("stage2." + version + ".txt")).string());
  t.limb_recheck = ReadFile((base / ("limb_recheck." + version + ".txt")).string());
  return t;
}

std::string RenderTemplate(const std::string& tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) throw ConfigError("unterminated placeholder in template");
    const std::string name = tmpl.substr(open + 2, close - open - 2);
    auto it = vars.find(name);
    if (it == vars.end()) throw ConfigError("template placeholder '" + name + "' has no value");
    out.append(tmpl, pos, open - pos);
    out += it->second;
    pos = close + 2;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

// ---------------------------------------------------------------------------

Stage1Result EvaluateStage1(const Stage1Input& input, JudgeClient& judge,
                            const JudgeProtocolConfig& config) {
  std::string item_list;
  for (std::size_t i = 0; i < input.garments.size(); ++i) {
    item_list += "- image " + std::to_string(i + 2) + ": garment_id \"" +
                 input.garments[i].garment_id + "\", category \"" +
                 std::string(ToString(input.garments[i].category)) + "\"\n";
  }
  JudgeRequest req;
  req.stage = kStage1;
  req.pair_id = input.pair_id;
  req.temperature = config.temperature;
  req.prompt = RenderTemplate(
      config.templates.stage1,
      {{"version", config.templates.version},
       {"item_list", item_list},
       {"item_count", std::to_string(input.garments.size())},
       {"last_reference_image", std::to_string(input.garments.size() + 1)}});
  req.images.push_back({"person", input.person_uri, ""});
  for (const auto& g : input.garments) req.images.push_back({"garment", g.image_uri, g.garment_id});
  req.images.push_back({"result", input.result_uri, ""});

  Stage1Result out;
  CallWithRepair(judge, req, config.max_parse_retries, out.exchanges, [&](const Json& j) {
    int identity = 0;
    std::string rationale;
    if (auto p = ReadScore(j.value("identity", Json()), "identity", identity, rationale); !p.empty()) {
      return p;
    }
    auto garments = j.find("garments");
    if (garments == j.end() || !garments->is_array()) return std::string("garments must be an array");
    if (garments->size() != input.garments.size()) {
      return "expected " + std::to_string(input.garments.size()) + " garment scores, got " +
             std::to_string(garments->size());
    }
    std::map<std::string, const Json*> by_id;
    for (const auto& g : *garments) {
      if (!g.is_object() || !g.contains("garment_id") || !g["garment_id"].is_string()) {
        return std::string("every garment entry needs a string garment_id");
      }
      if (!by_id.emplace(g["garment_id"].get<std::string>(), &g).second) {
        return "garment_id " + g["garment_id"].dump() + " scored twice";
      }
    }
    std::vector<FidelityItem> items;
    for (const auto& expected : input.garments) {
      auto it = by_id.find(expected.garment_id);
      if (it == by_id.end()) return "no score for garment_id \"" + expected.garment_id + "\"";
      const Json& g = *it->second;
      const std::string label(ToString(expected.category));
      if (g.value("category", "") != label) {
        return "garment_id \"" + expected.garment_id + "\" must carry category \"" + label + "\"";
      }
      FidelityItem item{expected.garment_id, expected.category, 0, {}};
      if (auto p = ReadScore(g, "garments[" + expected.garment_id + "]", item.value, item.rationale);
          !p.empty()) {
        return p;
      }
      items.push_back(std::move(item));
    }
    out.identity = {Dimension::kIdentity, static_cast<double>(identity), rationale};
    out.items = std::move(items);
    return std::string();
  });
  return out;
}

Stage2Result EvaluateStage2(const std::string& pair_id, const std::string& person_uri,
                            const std::string& result_uri, JudgeClient& judge,
                            const JudgeProtocolConfig& config) {
  JudgeRequest req;
  req.stage = kStage2;
  req.pair_id = pair_id;
  req.temperature = config.temperature;
  req.prompt = RenderTemplate(config.templates.stage2, {{"version", config.templates.version}});
  req.images = {{"person", person_uri, ""}, {"result", result_uri, ""}};

  Stage2Result out;
  CallWithRepair(judge, req, config.max_parse_retries, out.exchanges, [&](const Json& j) {
    auto bt = ParseEnum<BackgroundType>(j.value("background_type", ""));
    if (!bt) return std::string("background_type must be \"plain\" or \"complex\"");
    int bg = 0, phys = 0;
    std::string bg_r, phys_r;
    if (auto p = ReadScore(j.value("background", Json()), "background", bg, bg_r); !p.empty()) return p;
    const Json physics = j.value("physics", Json());
    if (auto p = ReadScore(physics, "physics", phys, phys_r); !p.empty()) return p;
    auto flag = physics.find("limb_anomaly_flag");
    if (flag == physics.end() || !flag->is_boolean()) {
      return std::string("physics.limb_anomaly_flag must be a boolean");
    }
    out.background_type = *bt;
    out.background = {Dimension::kBackground, static_cast<double>(bg), bg_r};
    out.physics = {Dimension::kPhysics, static_cast<double>(phys), phys_r};
    out.limb_anomaly_flag = flag->get<bool>();
    return std::string();
  });

  if (out.limb_anomaly_flag) {
    JudgeRequest recheck;
    recheck.stage = kLimbRecheck;
    recheck.pair_id = pair_id;
    recheck.temperature = config.temperature;
    recheck.prompt = RenderTemplate(config.templates.limb_recheck,
                                    {{"version", config.templates.version},
                                     {"suspected_issue", out.physics.rationale}});
    recheck.images = {{"person", person_uri, ""}, {"result", result_uri, ""}};
    out.limb_recheck_performed = true;
    CallWithRepair(judge, recheck, config.max_parse_retries, out.exchanges, [&](const Json& j) {
      auto confirmed = j.find("limb_anomaly_confirmed");
      if (confirmed == j.end() || !confirmed->is_boolean()) {
        return std::string("limb_anomaly_confirmed must be a boolean");
      }
      int score = 0;
      std::string rationale;
      if (auto p = ReadScore(j, "recheck", score, rationale); !p.empty()) return p;
      out.limb_anomaly_confirmed = confirmed->get<bool>();
      out.physics = {Dimension::kPhysics, static_cast<double>(score), rationale};
      return std::string();
    });
  }
  return out;
}

// ---------------------------------------------------------------------------

double OverallScore(double identity, double fidelity, double background, double physics) {
  return std::pow(identity * fidelity * background * physics, 0.25);
}

double AggregateFidelity(std::span<const FidelityItem> items, FidelityAggregation rule) {
  if (items.empty()) throw Error("no fidelity items to aggregate");
  if (rule == FidelityAggregation::kMin) {
    int lo = items.front().value;
    for (const auto& it : items) lo = std::min(lo, it.value);
    return lo;
  }
  double sum = 0.0;
  for (const auto& it : items) sum += it.value;
  return sum / static_cast<double>(items.size());
}

SampleEvaluation AggregateSample(const std::string& pair_id, const std::string& system_id,
                                 std::size_t item_count, const Stage1Result& stage1,
                                 const Stage2Result& stage2, FidelityAggregation rule) {
  SampleEvaluation e;
  e.pair_id = pair_id;
  e.system_id = system_id;
  e.item_count = item_count;
  e.status = SampleStatus::kEvaluated;
  e.identity = stage1.identity;
  e.fidelity_items = stage1.items;
  std::string rationale;
  for (const auto& it : stage1.items) {
    if (!rationale.empty()) rationale += " | ";
    rationale += it.garment_id + ": " + it.rationale;
  }
  e.fidelity = {Dimension::kFidelity, AggregateFidelity(stage1.items, rule), rationale};
  e.background = stage2.background;
  e.background_type = stage2.background_type;
  e.physics = stage2.physics;
  e.limb_recheck_performed = stage2.limb_recheck_performed;
  e.overall = OverallScore(e.identity.value, e.fidelity.value, e.background.value, e.physics.value);
  e.transcripts = stage1.exchanges;
  e.transcripts.insert(e.transcripts.end(), stage2.exchanges.begin(), stage2.exchanges.end());
  return e;
}

SampleEvaluation EvaluateSample(const TryOnPair& pair, const GenerationResult* result,
                                const Catalog& catalog, JudgeClient& judge,
                                const JudgeProtocolConfig& config) {
  SampleEvaluation e;
  e.pair_id = pair.pair_id;
  e.item_count = pair.item_count();
  if (result != nullptr) e.system_id = result->system_id;
  if (result == nullptr || result->status != GenerationStatus::kOk) {
    e.status = SampleStatus::kMissing;
    e.reason = result == nullptr ? "no generation result" : result->reason;
    return e;
  }
  const auto* model = catalog.FindModel(pair.model_image_id);
  if (model == nullptr) throw UnknownIdError(pair.model_image_id);
  Stage1Input in{pair.pair_id, model->image_uri, {}, result->image_uri};
  for (const auto& item : PromptOrder(pair)) {
    const auto* g = catalog.FindGarment(item.garment_id);
    if (g == nullptr) throw UnknownIdError(item.garment_id);
    in.garments.push_back({g->id, g->category, g->image_uri});
  }
  Stage1Result s1;
  try {
    s1 = EvaluateStage1(in, judge, config);
    auto s2 = EvaluateStage2(pair.pair_id, model->image_uri, result->image_uri, judge, config);
    auto out = AggregateSample(pair.pair_id, result->system_id, pair.item_count(), s1, s2,
                               config.fidelity_rule);
    return out;
  } catch (const JudgeParseError& err) {
    e.status = SampleStatus::kJudgeFailed;
    e.reason = err.what();
  } catch (const AdapterError& err) {
    e.status = SampleStatus::kPending;
    e.reason = err.what();
  }
  return e;
}

// ---------------------------------------------------------------------------

Json ToJson(const SampleEvaluation& e) {
  Json j{{"schema_version", kSchemaVersion},
         {"pair_id", e.pair_id},
         {"system_id", e.system_id},
         {"item_count", e.item_count},
         {"status", ToString(e.status)}};
  if (!e.reason.empty()) j["reason"] = e.reason;
  if (e.status == SampleStatus::kEvaluated) {
    Json items = Json::array();
    for (const auto& it : e.fidelity_items) {
      items.push_back({{"garment_id", it.garment_id},
                       {"category", ToString(it.category)},
                       {"value", it.value},
                       {"rationale", it.rationale}});
    }
    j["identity"] = ScoreToJson(e.identity);
    j["fidelity_items"] = items;
    j["fidelity"] = ScoreToJson(e.fidelity);
    j["background"] = ScoreToJson(e.background);
    j["background_type"] = ToString(e.background_type);
    j["physics"] = ScoreToJson(e.physics);
    j["limb_recheck_performed"] = e.limb_recheck_performed;
    j["overall"] = e.overall;
  }
  j["transcripts"] = ExchangesToJson(e.transcripts);
  return j;
}

SampleEvaluation SampleEvaluationFromJson(const Json& j) {
  SampleEvaluation e;
  e.pair_id = j.at("pair_id").get<std::string>();
  e.system_id = j.at("system_id").get<std::string>();
  e.item_count = j.at("item_count").get<std::size_t>();
  auto status = ParseEnum<SampleStatus>(j.at("status").get<std::string>());
  if (!status) throw ValidationError(e.pair_id, "unknown sample status");
  e.status = *status;
  e.reason = j.value("reason", "");
  if (e.status == SampleStatus::kEvaluated) {
    e.identity = ScoreFromJson(j.at("identity"), Dimension::kIdentity);
    e.fidelity = ScoreFromJson(j.at("fidelity"), Dimension::kFidelity);
    e.background = ScoreFromJson(j.at("background"), Dimension::kBackground);
    e.physics = ScoreFromJson(j.at("physics"), Dimension::kPhysics);
    for (const auto& it : j.at("fidelity_items")) {
      auto cat = ParseEnum<Category>(it.at("category").get<std::string>());
      if (!cat) throw ValidationError(e.pair_id, "unknown fidelity item category");
      e.fidelity_items.push_back({it.at("garment_id").get<std::string>(), *cat,
                                  it.at("value").get<int>(), it.value("rationale", "")});
    }
    e.background_type =
        ParseEnum<BackgroundType>(j.value("background_type", "plain")).value_or(BackgroundType::kPlain);
    e.limb_recheck_performed = j.value("limb_recheck_performed", false);
    e.overall = j.at("overall").get<double>();
  }
  if (j.contains("transcripts")) e.transcripts = ExchangesFromJson(j["transcripts"]);
  return e;
}

std::vector<SampleEvaluation> LoadEvaluations(const std::string& path) {
  std::vector<SampleEvaluation> out;
  ForEachJsonLine(path, [&](const Json& j, std::size_t line) {
    try {
      out.push_back(SampleEvaluationFromJson(j));
    } catch (const Json::exception& e) {
      throw ParseError(path, line, e.what());
    }
  });
  return out;
}

bool InSplit(std::size_t item_count, Split split) {
  switch (split) {
    case Split::kAll: return true;
    case Split::kSingle: return item_count == 1;
    case Split::kMulti: return item_count > 1;
  }
  return false;
}

Json ToJson(const BenchmarkSummary& s) {
  Json j{{"system_id", s.system_id},
         {"split", ToString(s.split)},
         {"n_pairs", s.n_pairs},
         {"n_evaluated", s.n_evaluated},
         {"n_missing", s.n_missing},
         {"n_judge_failed", s.n_judge_failed},
         {"n_pending", s.n_pending},
         {"comparable", s.comparable}};
  if (s.comparable) {
    j["overall"] = s.overall;
    j["identity"] = s.identity;
    j["fidelity"] = s.fidelity;
    j["background"] = s.background;
    j["physics"] = s.physics;
  } else {
    j["status"] = "not_comparable";
  }
  return j;
}

BenchmarkSummary SummarizeEvaluations(const std::string& system_id,
                                      std::span<const SampleEvaluation> samples, Split split) {
  BenchmarkSummary s;
  s.system_id = system_id;
  s.split = split;
  double overall = 0, identity = 0, fidelity = 0, background = 0, physics = 0;
  for (const auto& e : samples) {
    if (!InSplit(e.item_count, split)) continue;
    ++s.n_pairs;
    switch (e.status) {
      case SampleStatus::kMissing: ++s.n_missing; continue;
      case SampleStatus::kJudgeFailed: ++s.n_judge_failed; continue;
      case SampleStatus::kPending: ++s.n_pending; continue;
      case SampleStatus::kEvaluated: break;
    }
    ++s.n_evaluated;
    overall += e.overall;
    identity += e.identity.value;
    fidelity += e.fidelity.value;
    background += e.background.value;
    physics += e.physics.value;
  }
  s.comparable = s.n_evaluated > 0;
  if (s.comparable) {
    const double n = static_cast<double>(s.n_evaluated);
    s.overall = overall / n;
    s.identity = identity / n;
    s.fidelity = fidelity / n;
    s.background = background / n;
    s.physics = physics / n;
  }
  return s;
}

BenchmarkEvaluation EvaluateBenchmark(std::span<const TryOnPair> pairs,
                                      std::span<const GenerationResult> results,
                                      const std::string& system_id, const Catalog& catalog,
                                      JudgeClient& judge, const JudgeProtocolConfig& config,
                                      Journal* journal) {
  if (config.max_parse_retries < 0) throw ConfigError("max_parse_retries must be >= 0");
  std::map<std::string, const GenerationResult*> by_pair;
  for (const auto& r : results) {
    if (r.system_id == system_id) by_pair[r.pair_id] = &r;
  }
  std::map<std::string, SampleEvaluation> done;
  if (journal != nullptr) {
    for (const auto& rec : journal->Records()) {
      if (rec.value("system_id", "") != system_id) continue;
      auto e = SampleEvaluationFromJson(rec);
      if (e.status != SampleStatus::kPending) done[e.pair_id] = std::move(e);
    }
  }
  BenchmarkEvaluation out;
  out.samples.resize(pairs.size());
  ParallelFor(pairs.size(), config.max_parallel, [&](std::size_t i) {
    if (auto it = done.find(pairs[i].pair_id); it != done.end()) {
      out.samples[i] = it->second;
      return;
    }
    auto r = by_pair.find(pairs[i].pair_id);
    out.samples[i] = EvaluateSample(pairs[i], r == by_pair.end() ? nullptr : r->second, catalog,
                                    judge, config);
    out.samples[i].system_id = system_id;
    if (journal != nullptr) journal->Append(ToJson(out.samples[i]));
  });
  out.summary = SummarizeEvaluations(system_id, out.samples);
  return out;
}

}  // namespace benchkit
