// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/curation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

constexpr const char* kStageFilter = "filter";
constexpr const char* kStageTag = "tag";
constexpr const char* kStageAnonymize = "anonymize";

std::int64_t NowUnixMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string HexU64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool FilterPassed(const CurationJournal* journal, const std::string& id) {
  if (journal == nullptr) return true;
  auto f = journal->Find(id, kStageFilter);
  return !f || f->value("result", "") == "accepted";
}

}  // namespace

std::vector<std::string> FilterRuleSet::Validate() const {
  std::vector<std::string> out;
  if (min_resolution < 0) out.push_back("min_resolution must be non-negative");
  if (dedup_distance_threshold < 0) out.push_back("dedup_distance_threshold must be non-negative");
  if (aspect_ratio_min <= 0) out.push_back("aspect_ratio_min must be positive");
  if (!(aspect_ratio_min < aspect_ratio_max)) out.push_back("aspect_ratio_min must be < max");
  return out;
}

FilterRuleSet FilterRuleSetFromJson(const Json& j) {
  FilterRuleSet r;
  r.min_resolution = j.value("min_resolution", r.min_resolution);
  if (auto b = j.find("aspect_ratio_bounds"); b != j.end()) {
    r.aspect_ratio_min = b->at(0).get<double>();
    r.aspect_ratio_max = b->at(1).get<double>();
  }
  r.require_single_primary_subject =
      j.value("require_single_primary_subject", r.require_single_primary_subject);
  r.dedup_distance_threshold = j.value("dedup_distance_threshold", r.dedup_distance_threshold);
  r.nsfw_reject = j.value("nsfw_reject", r.nsfw_reject);
  if (auto v = r.Validate(); !v.empty()) throw ConfigError("invalid filter rules: " + v.front());
  return r;
}

Json ToJson(const FilterRuleSet& r) {
  return Json{{"min_resolution", r.min_resolution},
              {"aspect_ratio_bounds", {r.aspect_ratio_min, r.aspect_ratio_max}},
              {"require_single_primary_subject", r.require_single_primary_subject},
              {"dedup_distance_threshold", r.dedup_distance_threshold},
              {"nsfw_reject", r.nsfw_reject}};
}

std::vector<CurationEntry> EntriesFromCatalog(const Catalog& catalog) {
  std::vector<CurationEntry> out;
  for (const auto& m : catalog.models()) out.push_back({m.id, m.image_uri, EntryKind::kModel});
  for (const auto& g : catalog.garments()) out.push_back({g.id, g.image_uri, EntryKind::kGarment});
  return out;
}

// ---------------------------------------------------------------------------

CurationJournal::CurationJournal(const std::string& path) : journal_(path) {
  for (const auto& r : journal_.Records()) {
    if (r.contains("entry_id") && r.contains("stage")) {
      latest_[{r["entry_id"].get<std::string>(), r["stage"].get<std::string>()}] = r;
    }
  }
}

std::optional<Json> CurationJournal::Find(const std::string& entry_id,
                                          const std::string& stage) const {
  std::lock_guard lock(mu_);
  auto it = latest_.find({entry_id, stage});
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

void CurationJournal::Record(const std::string& entry_id, const std::string& stage, Json outcome) {
  outcome["entry_id"] = entry_id;
  outcome["stage"] = stage;
  outcome["recorded_at_ms"] = NowUnixMillis();
  journal_.Append(outcome);
  std::lock_guard lock(mu_);
  latest_[{entry_id, stage}] = std::move(outcome);
}

bool CurationJournal::TryClaim(const std::string& entry_id) {
  std::lock_guard lock(mu_);
  return claimed_.insert(entry_id).second;
}

void CurationJournal::Release(const std::string& entry_id) {
  std::lock_guard lock(mu_);
  claimed_.erase(entry_id);
}

std::vector<CurationRecord> BuildCurationRecords(const CurationJournal& journal) {
  std::map<std::string, CurationRecord> by_id;
  for (const auto& r : journal.Records()) {
    const auto id = r.value("entry_id", "");
    const auto stage = r.value("stage", "");
    auto& rec = by_id[id];
    rec.entry_id = id;
    if (stage == kStageFilter) rec.filter = r;
    if (stage == kStageTag) rec.tagging = r;
    if (stage == kStageAnonymize) rec.anonymization = r;
  }
  std::vector<CurationRecord> out;
  for (auto& [id, rec] : by_id) out.push_back(std::move(rec));
  return out;
}

// ---------------------------------------------------------------------------

FilterPartition ApplyFilters(std::span<const CurationEntry> entries, const FilterRuleSet& rules,
                             MediaAnalyzer& analyzer, CurationJournal* journal) {
  if (auto v = rules.Validate(); !v.empty()) throw ConfigError("invalid filter rules: " + v.front());
  FilterPartition out;
  std::vector<std::uint64_t> accepted_hashes;
  for (const auto& e : entries) {
    if (journal != nullptr) {
      if (auto prior = journal->Find(e.id, kStageFilter)) {
        if (prior->value("result", "") == "accepted") {
          out.accepted.push_back(e.id);
          accepted_hashes.push_back(std::stoull(prior->value("phash", "0"), nullptr, 16));
        } else {
          out.rejected.push_back({e.id, prior->value("failed_rules", std::vector<std::string>{})});
        }
        continue;
      }
    }
    MediaInfo info;
    try {
      info = analyzer.Analyze(e.id, e.image_uri);
    } catch (const AdapterError&) {
      out.undetermined.push_back(e.id);
      continue;
    }
    std::vector<std::string> failed;
    if (std::min(info.width, info.height) < rules.min_resolution) {
      failed.emplace_back(kRuleMinResolution);
    }
    const double aspect = info.height > 0 ? static_cast<double>(info.width) / info.height : 0.0;
    if (aspect < rules.aspect_ratio_min || aspect > rules.aspect_ratio_max) {
      failed.emplace_back(kRuleAspectRatio);
    }
    if (rules.require_single_primary_subject && e.kind == EntryKind::kModel &&
        info.subject_count != 1) {
      failed.emplace_back(kRuleSingleSubject);
    }
    for (auto h : accepted_hashes) {
      if (std::popcount(h ^ info.phash) <= rules.dedup_distance_threshold) {
        failed.emplace_back(kRuleDedup);
        break;
      }
    }
    if (rules.nsfw_reject && info.nsfw) failed.emplace_back(kRuleNsfw);

    if (failed.empty()) {
      out.accepted.push_back(e.id);
      accepted_hashes.push_back(info.phash);
    } else {
      out.rejected.push_back({e.id, failed});
    }
    if (journal != nullptr) {
      journal->Record(e.id, kStageFilter,
                      {{"result", failed.empty() ? "accepted" : "rejected"},
                       {"failed_rules", failed},
                       {"phash", HexU64(info.phash)}});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Json ToJson(const TagProposal& p) {
  return Json{{"entry_id", p.entry_id},
              {"status", p.status == TagProposal::Status::kOk ? "ok" : "failed"},
              {"original", p.original},
              {"proposed", p.proposed},
              {"confidence", p.confidence},
              {"needs_review", p.needs_review},
              {"retries", p.retries},
              {"error", p.error}};
}

namespace {

TagProposal TagProposalFromJson(const Json& j) {
  TagProposal p;
  p.entry_id = j.at("entry_id").get<std::string>();
  p.status = j.at("status") == "ok" ? TagProposal::Status::kOk : TagProposal::Status::kFailed;
  p.original = j.at("original").get<TagMap>();
  p.proposed = j.at("proposed").get<TagMap>();
  p.confidence = j.at("confidence").get<std::map<std::string, double>>();
  p.needs_review = j.at("needs_review").get<std::set<std::string>>();
  p.retries = j.at("retries").get<int>();
  p.error = j.value("error", "");
  return p;
}

Json DimensionsJson(const std::vector<TagDimension>& dims) {
  Json arr = Json::array();
  for (const auto& d : dims) arr.push_back({{"name", d.name}, {"values", d.values}, {"open", d.open}});
  return arr;
}

}  // namespace

TagProposal RefineTags(const std::string& entry_id, const std::string& image_uri, EntryKind kind,
                       const TagMap& current, TaggingClient& tagger, const TagTaxonomy& taxonomy,
                       int max_retries) {
  const auto& dims =
      kind == EntryKind::kModel ? taxonomy.model_dimensions : taxonomy.garment_dimensions;
  TagProposal p;
  p.entry_id = entry_id;
  p.original = current;

  TaggingRequest req;
  req.entry_id = entry_id;
  req.image_uri = image_uri;
  req.kind = kind == EntryKind::kModel ? "model" : "garment";
  req.dimensions = DimensionsJson(dims);
  req.current_tags = current;

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    req.attempt = attempt;
    const std::string raw = tagger.Propose(req);
    const Json parsed = Json::parse(raw, nullptr, /*allow_exceptions=*/false);
    std::string problem;
    if (parsed.is_discarded() || !parsed.is_object()) {
      problem = "response is not a JSON object";
    } else if (!parsed.contains("tags") || !parsed["tags"].is_object()) {
      problem = "response lacks a 'tags' object";
    } else {
      for (const auto& [name, entry] : parsed["tags"].items()) {
        if (!entry.is_object() || !entry.contains("value") || !entry["value"].is_string() ||
            !entry.contains("confidence") || !entry["confidence"].is_number()) {
          problem = "tag '" + name + "' must be {value: string, confidence: number}";
          break;
        }
      }
    }
    if (!problem.empty()) {
      req.repair_hint = problem;
      p.error = problem;
      continue;
    }

    p.retries = attempt;
    p.error.clear();
    const Json& tags = parsed["tags"];
    for (const auto& d : dims) {
      auto fallback = current.find(d.name);
      const std::string fallback_value = fallback == current.end() ? "" : fallback->second;
      if (!tags.contains(d.name)) {
        p.proposed[d.name] = fallback_value;
        p.confidence[d.name] = 0.0;
        p.needs_review.insert(d.name);
        continue;
      }
      const auto value = tags[d.name]["value"].get<std::string>();
      const double conf = tags[d.name]["confidence"].get<double>();
      if (!d.Accepts(value) || !(conf >= 0.0 && conf <= 1.0)) {
        p.proposed[d.name] = fallback_value;
        p.confidence[d.name] = 0.0;
        p.needs_review.insert(d.name);
        continue;
      }
      p.proposed[d.name] = value;
      p.confidence[d.name] = conf;
    }
    return p;
  }
  p.status = TagProposal::Status::kFailed;
  p.retries = max_retries;
  p.proposed = current;
  for (const auto& d : dims) p.confidence[d.name] = 0.0;
  p.error = "unparseable tagger output after " + std::to_string(max_retries) +
            " retries: " + p.error;
  return p;
}

std::vector<TagProposal> RunTagging(const Catalog& catalog, TaggingClient& tagger,
                                    int max_retries, CurationJournal* journal) {
  std::vector<TagProposal> out;
  auto process = [&](const std::string& id, const std::string& uri, EntryKind kind,
                     const TagMap& tags) {
    if (!FilterPassed(journal, id)) return;
    if (journal != nullptr) {
      if (auto prior = journal->Find(id, kStageTag)) {
        out.push_back(TagProposalFromJson(prior->at("proposal")));
        return;
      }
    }
    auto p = RefineTags(id, uri, kind, tags, tagger, catalog.taxonomy(), max_retries);
    if (journal != nullptr) journal->Record(id, kStageTag, {{"proposal", ToJson(p)}});
    out.push_back(std::move(p));
  };
  for (const auto& m : catalog.models()) process(m.id, m.image_uri, EntryKind::kModel, m.tags);
  for (const auto& g : catalog.garments()) {
    process(g.id, g.image_uri, EntryKind::kGarment, g.tags);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SurrogateFace> LoadSurrogateBank(const std::string& path) {
  std::vector<SurrogateFace> bank;
  ForEachJsonLine(path, [&](const Json& j, std::size_t line) {
    SurrogateFace s;
    try {
      s.id = j.at("id").get<std::string>();
      s.attributes.skin_tone = j.at("skin_tone").get<int>();
      auto g = ParseEnum<Gender>(j.at("gender").get<std::string>());
      auto a = ParseEnum<AgeGroup>(j.at("age_group").get<std::string>());
      if (!g || !a) throw ParseError(path, line, "invalid gender or age_group");
      s.attributes.gender = *g;
      s.attributes.age_group = *a;
      s.license_ref = j.at("license_ref").get<std::string>();
      s.image_uri = j.value("image_uri", "");
    } catch (const Json::exception& e) {
      throw ParseError(path, line, e.what());
    }
    if (s.attributes.skin_tone < kSkinToneMin || s.attributes.skin_tone > kSkinToneMax) {
      throw ValidationError(s.id, "skin_tone out of range 1..6");
    }
    bank.push_back(std::move(s));
  });
  return bank;
}

FaceAttributes FaceAttributesOf(const ModelImage& model) {
  FaceAttributes a;
  a.gender = model.gender;
  a.age_group = model.age_group;
  auto it = model.tags.find("skin_tone");
  if (it == model.tags.end()) throw ValidationError(model.id, "no skin_tone tag");
  int tone = 0;
  auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), tone);
  if (ec != std::errc() || tone < kSkinToneMin || tone > kSkinToneMax) {
    throw ValidationError(model.id, "skin_tone must be an integer 1..6");
  }
  a.skin_tone = tone;
  return a;
}

std::optional<double> SurrogateScore(const FaceAttributes& query, const FaceAttributes& candidate,
                                     const SurrogateWeights& weights) {
  if (query.gender != candidate.gender) return std::nullopt;
  constexpr double kAgeRange = static_cast<double>(EnumCount<AgeGroup>() - 1);
  constexpr double kSkinRange = kSkinToneMax - kSkinToneMin;
  const double age_prox =
      1.0 - std::abs(static_cast<int>(query.age_group) - static_cast<int>(candidate.age_group)) /
                kAgeRange;
  const double skin_prox = 1.0 - std::abs(query.skin_tone - candidate.skin_tone) / kSkinRange;
  return 1.0 + weights.age * age_prox + weights.skin * skin_prox;
}

const SurrogateFace& MatchSurrogate(const FaceAttributes& query,
                                    std::span<const SurrogateFace> bank,
                                    const SurrogateWeights& weights) {
  const SurrogateFace* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& s : bank) {
    auto score = SurrogateScore(query, s.attributes, weights);
    if (!score) continue;
    if (best == nullptr || *score > best_score || (*score == best_score && s.id < best->id)) {
      best = &s;
      best_score = *score;
    }
  }
  if (best == nullptr) {
    throw NoCandidateError(std::string("no surrogate with gender '") +
                           std::string(ToString(query.gender)) + "'");
  }
  return *best;
}

// ---------------------------------------------------------------------------

Json ToJson(const AnonymizationOutcome& o) {
  Json history = Json::array();
  for (const auto& l : o.history) {
    history.push_back(
        {{"attempt", l.attempt}, {"swapped_uri", l.swapped_uri}, {"verified", l.verified}});
  }
  return Json{{"entry_id", o.entry_id},         {"status", ToString(o.status)},
              {"surrogate_id", o.surrogate_id}, {"swapped_uri", o.swapped_uri},
              {"history", history},             {"error", o.error}};
}

namespace {

AnonymizationOutcome OutcomeFromJson(const Json& j) {
  AnonymizationOutcome o;
  o.entry_id = j.at("entry_id").get<std::string>();
  o.status = ParseEnum<AnonymizationStatus>(j.at("status").get<std::string>())
                 .value_or(AnonymizationStatus::kPending);
  o.surrogate_id = j.value("surrogate_id", "");
  o.swapped_uri = j.value("swapped_uri", "");
  o.error = j.value("error", "");
  for (const auto& l : j.value("history", Json::array())) {
    o.history.push_back({l.at("attempt").get<int>(), l.at("swapped_uri").get<std::string>(),
                         l.at("verified").get<bool>()});
  }
  return o;
}

AnonymizationOutcome AnonymizeOne(const ModelImage& m, std::span<const SurrogateFace> bank,
                                  FaceSwapper& swapper, SwapVerifier& verifier,
                                  const AnonymizationConfig& config) {
  AnonymizationOutcome o;
  o.entry_id = m.id;
  const SurrogateFace* surrogate = nullptr;
  try {
    surrogate = &MatchSurrogate(FaceAttributesOf(m), bank, config.weights);
  } catch (const Error& e) {
    o.error = e.what();
    return o;  // pending: needs a bank update or human action
  }
  o.surrogate_id = surrogate->id;
  try {
    for (int attempt = 1; attempt <= config.max_loops; ++attempt) {
      SwapRequest sreq{m.id, m.image_uri, surrogate->id, surrogate->license_ref,
                       Json{{"surrogate_image_uri", surrogate->image_uri}}, attempt};
      AnonymizationLoop loop;
      loop.attempt = attempt;
      loop.swapped_uri = swapper.Swap(sreq);
      loop.verified = verifier.Verify({m.id, m.image_uri, loop.swapped_uri, attempt});
      o.history.push_back(loop);
      if (loop.verified) {
        o.status = AnonymizationStatus::kVerified;
        o.swapped_uri = loop.swapped_uri;
        return o;
      }
    }
    o.status = AnonymizationStatus::kRejected;
  } catch (const AdapterError& e) {
    o.status = AnonymizationStatus::kPending;
    o.error = e.what();
  }
  return o;
}

}  // namespace

std::vector<AnonymizationOutcome> RunAnonymization(std::span<const ModelImage> entries,
                                                   std::span<const SurrogateFace> bank,
                                                   FaceSwapper& swapper, SwapVerifier& verifier,
                                                   const AnonymizationConfig& config,
                                                   CurationJournal* journal) {
  if (config.max_loops < 1) throw ConfigError("max_loops must be >= 1");
  std::vector<AnonymizationOutcome> out(entries.size());
  ParallelFor(entries.size(), config.max_parallel, [&](std::size_t i) {
    const ModelImage& m = entries[i];
    if (m.anonymization == AnonymizationStatus::kVerified ||
        m.anonymization == AnonymizationStatus::kRejected) {
      out[i].entry_id = m.id;
      out[i].status = m.anonymization;
      return;
    }
    if (!FilterPassed(journal, m.id)) {
      out[i].entry_id = m.id;
      out[i].status = AnonymizationStatus::kRejected;
      out[i].error = "blocked by filter stage";
      return;
    }
    if (journal != nullptr) {
      if (auto prior = journal->Find(m.id, kStageAnonymize)) {
        out[i] = OutcomeFromJson(*prior);
        return;
      }
      if (!journal->TryClaim(m.id)) {
        out[i].entry_id = m.id;
        out[i].error = "entry claimed by another worker";
        return;
      }
    }
    out[i] = AnonymizeOne(m, bank, swapper, verifier, config);
    if (journal != nullptr) {
      // Only terminal outcomes are journaled; pending entries are retried.
      if (out[i].status != AnonymizationStatus::kPending) {
        journal->Record(m.id, kStageAnonymize, ToJson(out[i]));
      }
      journal->Release(m.id);
    }
  });
  return out;
}

Catalog ApplyAnonymization(const Catalog& catalog, std::span<const AnonymizationOutcome> outcomes) {
  std::map<std::string, const AnonymizationOutcome*> by_id;
  for (const auto& o : outcomes) by_id[o.entry_id] = &o;
  std::vector<ModelImage> models = catalog.models();
  for (auto& m : models) {
    auto it = by_id.find(m.id);
    if (it == by_id.end()) continue;
    m.anonymization = it->second->status;
    if (it->second->status == AnonymizationStatus::kVerified && !it->second->swapped_uri.empty()) {
      m.image_uri = it->second->swapped_uri;
    }
  }
  return Catalog(catalog.taxonomy(), std::move(models), catalog.garments());
}

}  // namespace benchkit
