// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>
#include <set>

#include "benchkit/curation.hpp"
#include "benchkit/error.hpp"
#include "benchkit/util.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace benchkit;
using namespace benchkit::testing;

namespace {

Json Media(int w, int h, const std::string& phash, bool nsfw = false, int subjects = 1) {
  return {{"width", w}, {"height", h}, {"phash", phash}, {"nsfw", nsfw}, {"subject_count", subjects}};
}

std::vector<CurationEntry> Entries(int n, EntryKind kind = EntryKind::kModel) {
  std::vector<CurationEntry> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"e" + std::to_string(i), "file:///e" + std::to_string(i) + ".png", kind});
  }
  return out;
}

// Hashes spaced far apart so dedup never fires by accident.
std::string DistinctHash(int i) {
  std::mt19937_64 gen(1000 + i);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

Json FullTagResponse(const TagMap& tags, double confidence = 0.9) {
  Json t = Json::object();
  for (const auto& [k, v] : tags) t[k] = {{"value", v}, {"confidence", confidence}};
  return {{"tags", t}};
}

SurrogateFace Face(std::string id, int skin, Gender g, AgeGroup a) {
  return {std::move(id), {skin, g, a}, "lic-1", ""};
}

}  // namespace

TEST_SUITE("curation.filters") {
  TEST_CASE("default rules") {
    FilterRuleSet r;
    CHECK(r.min_resolution == 512);
    CHECK(r.aspect_ratio_min == doctest::Approx(1.0 / 3.0));
    CHECK(r.aspect_ratio_max == 3.0);
    CHECK(r.dedup_distance_threshold == 4);
    CHECK(r.Validate().empty());
    r.aspect_ratio_min = 4.0;
    CHECK_FALSE(r.Validate().empty());
    r = {};
    r.dedup_distance_threshold = -1;
    CHECK_FALSE(r.Validate().empty());
  }

  TEST_CASE("rules json roundtrip") {
    FilterRuleSet r;
    r.min_resolution = 700;
    r.nsfw_reject = false;
    const auto back = FilterRuleSetFromJson(ToJson(r));
    CHECK(back.min_resolution == 700);
    CHECK_FALSE(back.nsfw_reject);
  }

  TEST_CASE("below min resolution is rejected with that rule") {
    ScriptedResponses s(Json{{"responses", {{"e0", {Media(300, 400, "00")}}}}});
    ScriptedMediaAnalyzer a(std::move(s));
    auto entries = Entries(1);
    auto part = ApplyFilters(entries, {}, a);
    REQUIRE(part.rejected.size() == 1);
    CHECK(part.rejected[0].failed_rules == std::vector<std::string>{"min_resolution"});
  }

  TEST_CASE("exact duplicate: second entry rejected") {
    ScriptedResponses s(Json{{"responses",
                              {{"e0", {Media(1024, 1024, "abcdef0123456789")}},
                               {"e1", {Media(1024, 1024, "abcdef0123456789")}}}}});
    ScriptedMediaAnalyzer a(std::move(s));
    auto part = ApplyFilters(Entries(2), {}, a);
    CHECK(part.accepted == std::vector<std::string>{"e0"});
    REQUIRE(part.rejected.size() == 1);
    CHECK(part.rejected[0].entry_id == "e1");
    CHECK(part.rejected[0].failed_rules == std::vector<std::string>{"dedup"});
  }

  TEST_CASE("dedup threshold is inclusive Hamming distance") {
    // 0x0f differs from 0x00 in 4 bits, 0x1f in 5.
    ScriptedResponses s(Json{{"responses",
                              {{"e0", {Media(1024, 1024, "00")}},
                               {"e1", {Media(1024, 1024, "0f")}},
                               {"e2", {Media(1024, 1024, "ff00")}}}}});
    ScriptedMediaAnalyzer a(std::move(s));
    auto part = ApplyFilters(Entries(3), {}, a);
    CHECK(part.accepted == std::vector<std::string>{"e0", "e2"});
  }

  TEST_CASE("aspect ratio, subject count and multiple reasons") {
    ScriptedResponses s(Json{{"responses",
                              {{"e0", {Media(4000, 1000, "01")}},
                               {"e1", {Media(1024, 1024, DistinctHash(1), false, 2)}},
                               {"e2", {Media(100, 1000, DistinctHash(2), true)}}}}});
    ScriptedMediaAnalyzer a(std::move(s));
    auto part = ApplyFilters(Entries(3), {}, a);
    REQUIRE(part.rejected.size() == 3);
    CHECK(part.rejected[0].failed_rules == std::vector<std::string>{"aspect_ratio"});
    CHECK(part.rejected[1].failed_rules == std::vector<std::string>{"single_primary_subject"});
    CHECK(part.rejected[2].failed_rules ==
          std::vector<std::string>{"min_resolution", "aspect_ratio", "nsfw"});
  }

  TEST_CASE("subject count only applies to model images") {
    ScriptedResponses s(Json{{"default", Media(1024, 1024, "00", false, 3)}});
    ScriptedMediaAnalyzer a(std::move(s));
    auto part = ApplyFilters(Entries(1, EntryKind::kGarment), {}, a);
    CHECK(part.accepted.size() == 1);
  }

  TEST_CASE("100 entries with 7 flagged nsfw leaves 93 accepted") {
    Json responses = Json::object();
    for (int i = 0; i < 100; ++i) {
      responses["e" + std::to_string(i)] = {Media(1024, 1024, DistinctHash(i), i % 14 == 3)};
    }
    ScriptedMediaAnalyzer a(ScriptedResponses(Json{{"responses", responses}}));
    auto part = ApplyFilters(Entries(100), {}, a);
    CHECK(part.accepted.size() == 93);
    CHECK(part.rejected.size() == 7);
    for (const auto& r : part.rejected) CHECK(r.failed_rules == std::vector<std::string>{"nsfw"});
  }

  TEST_CASE("analyzer failure leaves the entry undetermined") {
    ScriptedResponses s(Json{{"responses", {{"e1", {Json{{"error", "down"}}}}}},
                             {"default", Media(1024, 1024, "00")}});
    ScriptedMediaAnalyzer a(std::move(s));
    auto part = ApplyFilters(Entries(2), {}, a);
    CHECK(part.accepted == std::vector<std::string>{"e0"});
    CHECK(part.undetermined == std::vector<std::string>{"e1"});
    CHECK(part.rejected.empty());
  }

  TEST_CASE("partition property over random fixtures") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
      Json responses = Json::object();
      const int n = 1 + static_cast<int>(gen() % 40);
      for (int i = 0; i < n; ++i) {
        const auto k = gen() % 10;
        if (k == 0) {
          responses["e" + std::to_string(i)] = {Json{{"error", "x"}}};
        } else {
          responses["e" + std::to_string(i)] = {
              Media(200 + static_cast<int>(gen() % 2000), 200 + static_cast<int>(gen() % 2000),
                    k < 3 ? "00" : DistinctHash(static_cast<int>(gen() % 1000)), k == 9,
                    1 + static_cast<int>(gen() % 2))};
        }
      }
      ScriptedMediaAnalyzer a(ScriptedResponses(Json{{"responses", responses}}));
      auto entries = Entries(n);
      auto part = ApplyFilters(entries, {}, a);
      std::multiset<std::string> seen(part.accepted.begin(), part.accepted.end());
      seen.insert(part.undetermined.begin(), part.undetermined.end());
      for (const auto& r : part.rejected) {
        CHECK_FALSE(r.failed_rules.empty());
        seen.insert(r.entry_id);
      }
      std::multiset<std::string> expected;
      for (const auto& e : entries) expected.insert(e.id);
      CHECK(seen == expected);
    }
  }

  TEST_CASE("resume makes no analyzer calls for journaled entries") {
    TempDir dir;
    const auto path = dir.File("curation.jsonl");
    ScriptedResponses s(Json{{"responses", {{"e1", {Json{{"error", "down"}}}}}},
                             {"default", Media(1024, 1024, "00")}});
    {
      CurationJournal j(path);
      ScriptedMediaAnalyzer a(std::move(s));
      auto part = ApplyFilters(Entries(3), {}, a, &j);
      CHECK(part.undetermined == std::vector<std::string>{"e1"});
      CHECK(a.script().TotalCalls() == 3);
    }
    CurationJournal j(path);
    ScriptedMediaAnalyzer a(ScriptedResponses(Json{{"default", Media(1024, 1024, DistinctHash(5))}}));
    auto part = ApplyFilters(Entries(3), {}, a, &j);
    CHECK(a.script().TotalCalls() == 1);
    CHECK(a.script().CallCount("e1") == 1);
    CHECK(part.accepted == std::vector<std::string>{"e0", "e1"});
    REQUIRE(part.rejected.size() == 1);
    CHECK(part.rejected[0].entry_id == "e2");  // duplicate of e0 from the first run
  }
}

TEST_SUITE("curation.tagging") {
  TEST_CASE("complete legal map is accepted verbatim") {
    const auto m = MakeModel("m1");
    auto proposed = m.tags;
    proposed["lighting"] = "natural";
    ScriptedTagger t(ScriptedResponses(Json{{"default", FullTagResponse(proposed)}}));
    auto p = RefineTags("m1", m.image_uri, EntryKind::kModel, m.tags, t, DefaultTaxonomy());
    CHECK(p.status == TagProposal::Status::kOk);
    CHECK(p.proposed == proposed);
    CHECK(p.original == m.tags);
    CHECK(p.needs_review.empty());
    CHECK(p.retries == 0);
    for (const auto& [k, c] : p.confidence) CHECK(c == doctest::Approx(0.9));
  }

  TEST_CASE("illegal value flags only that dimension") {
    const auto m = MakeModel("m1");
    auto proposed = m.tags;
    proposed["lighting"] = "neon";
    ScriptedTagger t(ScriptedResponses(Json{{"default", FullTagResponse(proposed)}}));
    auto p = RefineTags("m1", m.image_uri, EntryKind::kModel, m.tags, t, DefaultTaxonomy());
    CHECK(p.status == TagProposal::Status::kOk);
    CHECK(p.needs_review == std::set<std::string>{"lighting"});
    CHECK(p.proposed.at("lighting") == m.tags.at("lighting"));
    CHECK(p.proposed.size() == DefaultTaxonomy().model_dimensions.size());
  }

  TEST_CASE("missing dimension and out-of-range confidence are flagged") {
    const auto m = MakeModel("m1");
    auto resp = FullTagResponse(m.tags);
    resp["tags"].erase("framing");
    resp["tags"]["scenario"]["confidence"] = 1.5;
    ScriptedTagger t(ScriptedResponses(Json{{"default", resp}}));
    auto p = RefineTags("m1", m.image_uri, EntryKind::kModel, m.tags, t, DefaultTaxonomy());
    CHECK(p.needs_review == std::set<std::string>{"framing", "scenario"});
    for (const auto& [k, c] : p.confidence) {
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
    }
  }

  TEST_CASE("malformed twice then valid succeeds after two retries") {
    const auto m = MakeModel("m1");
    ScriptedTagger t(ScriptedResponses(Json{
        {"responses",
         {{"m1", {Json{{"raw", "not json"}}, Json{{"raw", "{\"tags\": 3}"}}, FullTagResponse(m.tags)}}}}}));
    auto p = RefineTags("m1", m.image_uri, EntryKind::kModel, m.tags, t, DefaultTaxonomy());
    CHECK(p.status == TagProposal::Status::kOk);
    CHECK(p.retries == 2);
    const auto reqs = t.transcript.requests();
    REQUIRE(reqs.size() == 3);
    CHECK(reqs[0].repair_hint.empty());
    CHECK_FALSE(reqs[1].repair_hint.empty());
    CHECK(reqs[2].attempt == 2);
  }

  TEST_CASE("malformed beyond the retry budget fails the proposal") {
    const auto m = MakeModel("m1");
    ScriptedTagger t(ScriptedResponses(Json{{"default", Json{{"raw", "nope"}}}}));
    auto p = RefineTags("m1", m.image_uri, EntryKind::kModel, m.tags, t, DefaultTaxonomy(), 2);
    CHECK(p.status == TagProposal::Status::kFailed);
    CHECK_FALSE(p.error.empty());
    CHECK(t.script().TotalCalls() == 3);
  }

  TEST_CASE("run tagging skips rejected entries and resumes from the journal") {
    Catalog c(DefaultTaxonomy(), {MakeModel("m1"), MakeModel("m2")},
              {MakeGarment("g1", Category::kTop)});
    CurationJournal j;
    j.Record("m2", "filter", {{"result", "rejected"}, {"failed_rules", {"nsfw"}}, {"phash", "0"}});
    Json responses = {{"m1", {FullTagResponse(MakeModel("m1").tags)}},
                      {"g1", {FullTagResponse(MakeGarment("g1", Category::kTop).tags)}}};
    ScriptedTagger t(ScriptedResponses(Json{{"responses", responses}}));
    auto first = RunTagging(c, t, 2, &j);
    CHECK(first.size() == 2);
    CHECK(t.script().TotalCalls() == 2);
    auto second = RunTagging(c, t, 2, &j);
    CHECK(second.size() == 2);
    CHECK(t.script().TotalCalls() == 2);
    CHECK(ToJson(second[0]) == ToJson(first[0]));
  }
}

TEST_SUITE("curation.surrogate") {
  TEST_CASE("exact attribute match wins") {
    std::vector<SurrogateFace> bank{Face("s1", 1, Gender::kFemale, AgeGroup::kSenior),
                                    Face("s2", 4, Gender::kFemale, AgeGroup::kTeenager),
                                    Face("s3", 4, Gender::kMale, AgeGroup::kTeenager)};
    CHECK(MatchSurrogate({4, Gender::kFemale, AgeGroup::kTeenager}, bank).id == "s2");
  }

  TEST_CASE("no gender match throws") {
    std::vector<SurrogateFace> bank{Face("s1", 3, Gender::kMale, AgeGroup::kYouth)};
    CHECK_THROWS_AS(MatchSurrogate({3, Gender::kFemale, AgeGroup::kYouth}, bank), NoCandidateError);
  }

  TEST_CASE("closer skin tone wins") {
    std::vector<SurrogateFace> bank{Face("b", 5, Gender::kFemale, AgeGroup::kYouth),
                                    Face("a", 2, Gender::kFemale, AgeGroup::kYouth)};
    const FaceAttributes q{3, Gender::kFemale, AgeGroup::kYouth};
    CHECK(MatchSurrogate(q, bank).id == "a");
    CHECK(*SurrogateScore(q, bank[1].attributes) == doctest::Approx(1.0 + 0.5 + 0.5 * 0.8));
    CHECK(*SurrogateScore(q, bank[0].attributes) == doctest::Approx(1.0 + 0.5 + 0.5 * 0.6));
  }

  TEST_CASE("ties break on ascending id") {
    std::vector<SurrogateFace> bank{Face("z", 2, Gender::kMale, AgeGroup::kYouth),
                                    Face("y", 4, Gender::kMale, AgeGroup::kYouth)};
    CHECK(MatchSurrogate({3, Gender::kMale, AgeGroup::kYouth}, bank).id == "y");
  }

  TEST_CASE("matches a brute-force argmax over random banks") {
    // Scores in integer units: 30 * (age_prox + skin_prox) with ranges 3 and 5.
    auto oracle = [](const FaceAttributes& q, const std::vector<SurrogateFace>& bank) {
      const SurrogateFace* best = nullptr;
      long best_units = -1;
      for (const auto& s : bank) {
        if (s.attributes.gender != q.gender) continue;
        const long age = 10 * (3 - std::abs(static_cast<int>(q.age_group) -
                                            static_cast<int>(s.attributes.age_group)));
        const long skin = 6 * (5 - std::abs(q.skin_tone - s.attributes.skin_tone));
        const long units = age + skin;
        if (units > best_units || (units == best_units && s.id < best->id)) {
          best = &s;
          best_units = units;
        }
      }
      return best;
    };
    std::mt19937_64 gen(99);
    auto pick = [&](int n) { return static_cast<int>(gen() % n); };
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<SurrogateFace> bank;
      const int n = 1 + pick(12);
      for (int i = 0; i < n; ++i) {
        bank.push_back(Face("s" + std::to_string(pick(1000)), 1 + pick(6),
                            static_cast<Gender>(pick(2)), static_cast<AgeGroup>(pick(4))));
      }
      const FaceAttributes q{1 + pick(6), static_cast<Gender>(pick(2)),
                             static_cast<AgeGroup>(pick(4))};
      const auto* expected = oracle(q, bank);
      if (expected == nullptr) {
        CHECK_THROWS_AS(MatchSurrogate(q, bank), NoCandidateError);
        continue;
      }
      const auto& got = MatchSurrogate(q, bank);
      CHECK(got.id == expected->id);
      CHECK(SurrogateScore(q, got.attributes) == SurrogateScore(q, expected->attributes));
      auto reversed = bank;
      std::reverse(reversed.begin(), reversed.end());
      CHECK(MatchSurrogate(q, reversed).id == got.id);
    }
  }

  TEST_CASE("bank loads from jsonl and validates skin tone") {
    TempDir dir;
    WriteFile(dir.File("bank.jsonl"),
              "{\"id\":\"s1\",\"skin_tone\":2,\"gender\":\"female\",\"age_group\":\"youth\","
              "\"license_ref\":\"L\"}\n");
    auto bank = LoadSurrogateBank(dir.File("bank.jsonl"));
    REQUIRE(bank.size() == 1);
    CHECK(bank[0].attributes.age_group == AgeGroup::kYouth);
    WriteFile(dir.File("bad.jsonl"),
              "{\"id\":\"s1\",\"skin_tone\":9,\"gender\":\"female\",\"age_group\":\"youth\","
              "\"license_ref\":\"L\"}\n");
    CHECK_THROWS_AS(LoadSurrogateBank(dir.File("bad.jsonl")), ValidationError);
  }
}

TEST_SUITE("curation.anonymization") {
  std::vector<SurrogateFace> Bank() {
    return {Face("sf", 3, Gender::kFemale, AgeGroup::kYouth),
            Face("sm", 3, Gender::kMale, AgeGroup::kYouth)};
  }

  std::vector<ModelImage> Pending(int n) {
    std::vector<ModelImage> out;
    for (int i = 0; i < n; ++i) {
      out.push_back(MakeModel("m" + std::to_string(i), i % 2 ? Gender::kMale : Gender::kFemale,
                              AnonymizationStatus::kPending));
    }
    return out;
  }

  TEST_CASE("always-pass verifier verifies everything in one loop") {
    ScriptedSwapper s(ScriptedResponses(Json{{"default", Json::object()}}));
    ScriptedVerifier v(ScriptedResponses(Json{{"default", {{"pass", true}}}}));
    auto models = Pending(6);
    auto out = RunAnonymization(models, Bank(), s, v);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].status == AnonymizationStatus::kVerified);
      CHECK(out[i].history.size() == 1);
      CHECK(out[i].surrogate_id == (i % 2 ? "sm" : "sf"));
      CHECK(out[i].swapped_uri == models[i].image_uri + "#swap-1");
    }
  }

  TEST_CASE("fail twice then pass ends verified after three loops") {
    ScriptedSwapper s(ScriptedResponses(Json{{"default", Json::object()}}));
    ScriptedVerifier v(ScriptedResponses(
        Json{{"responses", {{"m0", {{{"pass", false}}, {{"pass", false}}, {{"pass", true}}}}}}}));
    auto models = Pending(1);
    auto out = RunAnonymization(models, Bank(), s, v);
    REQUIRE(out.size() == 1);
    CHECK(out[0].status == AnonymizationStatus::kVerified);
    CHECK(out[0].history.size() == 3);
    CHECK(out[0].swapped_uri == models[0].image_uri + "#swap-3");
  }

  TEST_CASE("always failing is rejected at the loop bound") {
    ScriptedSwapper s(ScriptedResponses(Json{{"default", Json::object()}}));
    ScriptedVerifier v(ScriptedResponses(Json{{"default", {{"pass", false}}}}));
    auto models = Pending(1);
    auto out = RunAnonymization(models, Bank(), s, v);
    CHECK(out[0].status == AnonymizationStatus::kRejected);
    CHECK(out[0].history.size() == 3);
    CHECK(s.script().TotalCalls() == 3);
  }

  TEST_CASE("adapter failure keeps the entry pending and resumable") {
    CurationJournal j;
    ScriptedSwapper bad(ScriptedResponses(Json{{"responses", {{"m1", {{{"error", "timeout"}}}}}},
                                               {"default", Json::object()}}));
    ScriptedVerifier v(ScriptedResponses(Json{{"default", {{"pass", true}}}}));
    auto models = Pending(2);
    auto first = RunAnonymization(models, Bank(), bad, v, {}, &j);
    CHECK(first[0].status == AnonymizationStatus::kVerified);
    CHECK(first[1].status == AnonymizationStatus::kPending);
    CHECK_FALSE(first[1].error.empty());

    ScriptedSwapper good(ScriptedResponses(Json{{"default", Json::object()}}));
    auto second = RunAnonymization(models, Bank(), good, v, {}, &j);
    CHECK(good.script().CallCount("m0") == 0);
    CHECK(good.script().CallCount("m1") == 1);
    CHECK(second[1].status == AnonymizationStatus::kVerified);
    CHECK(ToJson(second[0]) == ToJson(first[0]));
  }

  TEST_CASE("filter rejection blocks anonymization") {
    CurationJournal j;
    j.Record("m0", "filter", {{"result", "rejected"}, {"failed_rules", {"nsfw"}}, {"phash", "0"}});
    ScriptedSwapper s(ScriptedResponses(Json{{"default", Json::object()}}));
    ScriptedVerifier v(ScriptedResponses(Json{{"default", {{"pass", true}}}}));
    auto models = Pending(1);
    auto out = RunAnonymization(models, Bank(), s, v, {}, &j);
    CHECK(out[0].status == AnonymizationStatus::kRejected);
    CHECK(s.script().TotalCalls() == 0);
  }

  TEST_CASE("records fold in stage order and apply to the catalog") {
    CurationJournal j;
    ScriptedSwapper s(ScriptedResponses(Json{{"default", Json::object()}}));
    ScriptedVerifier v(ScriptedResponses(Json{{"default", {{"pass", true}}}}));
    auto models = Pending(2);
    j.Record("m0", "filter", {{"result", "accepted"}, {"failed_rules", Json::array()}, {"phash", "0"}});
    auto out = RunAnonymization(models, Bank(), s, v, {}, &j);
    auto records = BuildCurationRecords(j);
    REQUIRE(records.size() == 2);
    CHECK(records[0].entry_id == "m0");
    CHECK(records[0].filter.has_value());
    CHECK(records[0].anonymization.has_value());
    CHECK_FALSE(records[1].filter.has_value());

    Catalog c(DefaultTaxonomy(), models, {});
    auto updated = ApplyAnonymization(c, out);
    CHECK(updated.FindModel("m0")->anonymization == AnonymizationStatus::kVerified);
    CHECK(updated.FindModel("m0")->image_uri == models[0].image_uri + "#swap-1");
  }
}
