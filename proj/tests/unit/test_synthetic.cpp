// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "benchkit/adapters.hpp"
#include "benchkit/judge.hpp"
#include "benchkit/pairing.hpp"
#include "benchkit/synthetic.hpp"
#include "benchkit/util.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace benchkit;
using namespace benchkit::testing;

TEST_SUITE("synthetic.catalog") {
  TEST_CASE("counts follow the options") {
    SyntheticCatalogOptions o;
    o.models = 20;
    o.garments_per_category = 10;
    o.subcategories_per_category = 3;
    o.seed = 4;
    const auto c = MakeSyntheticCatalog(o);
    CHECK(c.models().size() == 20);
    CHECK(c.garments().size() == 10 * std::size_t{8});
    CHECK(c.SubcategoryCount() == 3 * std::size_t{8});
    for (const auto& m : c.models()) CHECK(m.anonymization == AnonymizationStatus::kVerified);
  }

  TEST_CASE("seeded and reloadable") {
    SyntheticCatalogOptions o;
    o.seed = 9;
    const auto a = MakeSyntheticCatalog(o);
    CHECK(a.Serialize() == MakeSyntheticCatalog(o).Serialize());
    o.seed = 10;
    CHECK(a.Serialize() != MakeSyntheticCatalog(o).Serialize());
    TempDir dir;
    WriteFile(dir.File("c.jsonl"), a.Serialize());
    CHECK(LoadCatalog({dir.File("c.jsonl")}, DefaultTaxonomy()).Serialize() == a.Serialize());
  }

  TEST_CASE("pairs compose and validate") {
    PairingConfig pc;
    pc.target_pair_count = 40;
    pc.seed = 2;
    const auto c = MakeSyntheticCatalog();
    const auto pairs = ComposePairs(c, pc);
    CHECK(pairs.size() == 40);
    for (const auto& p : pairs) CHECK(ValidatePair(p, c).empty());
  }
}

TEST_SUITE("synthetic.judge") {
  TEST_CASE("every sample evaluates with in-range scores") {
    const auto c = MakeSyntheticCatalog();
    PairingConfig pc;
    pc.target_pair_count = 30;
    const auto pairs = ComposePairs(c, pc);
    std::vector<GenerationResult> results;
    for (const auto& p : pairs) {
      GenerationResult r;
      r.pair_id = p.pair_id;
      r.system_id = "s";
      r.status = GenerationStatus::kOk;
      r.image_uri = "synthetic://s/" + p.pair_id;
      results.push_back(r);
    }
    SyntheticJudge judge(1, 6);
    const auto eval = EvaluateBenchmark(pairs, results, "s", c, judge);
    REQUIRE(eval.samples.size() == 30);
    for (const auto& e : eval.samples) {
      CHECK(e.status == SampleStatus::kEvaluated);
      for (double v : {e.identity.value, e.fidelity.value, e.background.value, e.physics.value}) {
        CHECK(v >= 1.0);
        CHECK(v <= 10.0);
      }
      CHECK(e.identity.value >= 6.0);
    }
    CHECK(eval.summary.comparable);
    SyntheticJudge again(1, 6);
    CHECK(ToJson(EvaluateBenchmark(pairs, results, "s", c, again).summary) == ToJson(eval.summary));
  }

  TEST_CASE("adapter spec selects the synthetic judge") {
    JudgeRequest r;
    r.stage = "stage2";
    r.pair_id = "p";
    r.images = {{"person", "a", ""}, {"result", "b", ""}};
    auto a = MakeJudge("synthetic:5");
    auto b = MakeJudge("synthetic:5");
    const auto reply = a->Complete(r);
    CHECK(reply == b->Complete(r));
    const auto j = Json::parse(reply);
    CHECK(j.contains("background"));
    CHECK(j.contains("physics"));
    CHECK(MakeJudge("synthetic") != nullptr);
  }
}
