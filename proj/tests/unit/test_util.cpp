// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include "benchkit/error.hpp"
#include "benchkit/jsonl.hpp"
#include "benchkit/taxonomy.hpp"
#include "benchkit/util.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace benchkit;
using benchkit::testing::TempDir;

TEST_SUITE("util") {
  TEST_CASE("sha256 matches the FIPS 180-2 test vectors") {
    CHECK(Sha256Hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(Sha256Hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("half-up rounding at three decimals") {
    CHECK(FormatFixed(9.3725, 3) == "9.373");
    CHECK(FormatFixed(9.3724999, 3) == "9.372");
    CHECK(FormatFixed(0.125, 2) == "0.13");
    CHECK(FormatFixed(2.5, 0) == "3");
    CHECK(FormatFixed(41.15, 1) == "41.2");
    CHECK(RoundHalfUp(8.8335, 3) == doctest::Approx(8.834));
  }

  TEST_CASE("one-decimal percentages reproduce exact fixtures") {
    const std::vector<std::size_t> gsb{411, 416, 173};
    const auto p = PercentagesOneDecimal(gsb);
    CHECK(p[0] == 41.1);
    CHECK(p[1] == 41.6);
    CHECK(p[2] == 17.3);
    const std::vector<std::size_t> thirds{1, 1, 1};
    const auto t = PercentagesOneDecimal(thirds);
    CHECK(t[0] == doctest::Approx(33.4));
    CHECK(t[1] == doctest::Approx(33.3));
    CHECK(t[2] == doctest::Approx(33.3));
    const std::vector<std::size_t> zero{0, 0};
    CHECK(PercentagesOneDecimal(zero) == std::vector<double>{0.0, 0.0});
  }

  TEST_CASE("percentages always sum to 100.0 and stay within a tenth of the exact share") {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<std::size_t> counts(1 + UniformIndex(rng, 7));
      for (auto& c : counts) c = UniformIndex(rng, 500);
      const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
      if (total == 0) continue;
      const auto p = PercentagesOneDecimal(counts);
      long tenths = 0;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        tenths += std::lround(p[i] * 10);
        CHECK(std::fabs(p[i] - 100.0 * static_cast<double>(counts[i]) / total) < 0.1 + 1e-9);
      }
      CHECK(tenths == 1000);
    }
  }

  TEST_CASE("apportionment preserves the total and respects quotas") {
    Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> w(1 + UniformIndex(rng, 6));
      for (auto& x : w) x = static_cast<double>(UniformIndex(rng, 100));
      const double sum = std::accumulate(w.begin(), w.end(), 0.0);
      if (sum == 0) continue;
      const std::size_t total = UniformIndex(rng, 3000);
      const auto a = Apportion(total, w);
      CHECK(std::accumulate(a.begin(), a.end(), std::size_t{0}) == total);
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double quota = static_cast<double>(total) * w[i] / sum;
        CHECK(static_cast<double>(a[i]) >= std::floor(quota) - 1e-9);
        CHECK(static_cast<double>(a[i]) <= std::ceil(quota) + 1e-9);
      }
    }
  }

  TEST_CASE("uniform index stays in range and is roughly flat") {
    Rng rng(1);
    std::vector<int> hist(6, 0);
    for (int i = 0; i < 60000; ++i) ++hist[UniformIndex(rng, 6)];
    double chi2 = 0;
    for (int h : hist) chi2 += (h - 10000.0) * (h - 10000.0) / 10000.0;
    CHECK(chi2 < 20.5);  // p ~ 0.001 for 5 degrees of freedom
  }

  TEST_CASE("shuffle is a seeded permutation") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto a = v, b = v;
    Rng r1(3), r2(3);
    Shuffle(r1, a);
    Shuffle(r2, b);
    CHECK(a == b);
    CHECK(a != v);
    std::sort(a.begin(), a.end());
    CHECK(a == v);
  }

  TEST_CASE("parallel for visits every index once and rethrows") {
    std::vector<std::atomic<int>> seen(500);
    ParallelFor(seen.size(), 4, [&](std::size_t i) { ++seen[i]; });
    for (const auto& s : seen) CHECK(s.load() == 1);
    CHECK_THROWS_AS(ParallelFor(10, 3,
                                [](std::size_t i) {
                                  if (i == 7) throw IoError("boom");
                                }),
                    IoError);
  }
}

TEST_SUITE("jsonl") {
  TEST_CASE("dump sorts keys so equal records give equal bytes") {
    Json a{{"b", 1}, {"a", 2}};
    CHECK(DumpJsonLines({a}) == "{\"a\":2,\"b\":1}\n");
  }

  TEST_CASE("parse errors carry the line number") {
    TempDir dir;
    WriteFile(dir.File("x.jsonl"), "{\"a\":1}\n\n{oops\n");
    try {
      ReadJsonLines(dir.File("x.jsonl"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("journal reloads records and survives a torn tail") {
    TempDir dir;
    const auto path = dir.File("j.jsonl");
    {
      Journal j(path);
      j.Append({{"n", 1}});
      j.Append({{"n", 2}});
    }
    {
      std::ofstream out(path, std::ios::app);
      out << "{\"n\": 3";  // interrupted write
    }
    {
      Journal j(path);
      CHECK(j.Records().size() == 2);
      j.Append({{"n", 4}});
    }
    Journal j(path);
    const auto recs = j.Records();
    REQUIRE(recs.size() == 3);
    CHECK(recs[2]["n"] == 4);
  }

  TEST_CASE("concurrent appends never interleave") {
    TempDir dir;
    const auto path = dir.File("j.jsonl");
    {
      Journal j(path);
      std::vector<std::jthread> threads;
      for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
          for (int i = 0; i < 200; ++i) j.Append({{"t", t}, {"i", i}, {"pad", std::string(100, 'x')}});
        });
      }
    }
    const auto recs = ReadJsonLines(path);
    CHECK(recs.size() == 1600);
    std::set<std::pair<int, int>> keys;
    for (const auto& r : recs) keys.insert({r["t"].get<int>(), r["i"].get<int>()});
    CHECK(keys.size() == 1600);
  }
}

TEST_SUITE("taxonomy") {
  TEST_CASE("default taxonomy has 11 model and 13 garment dimensions and is valid") {
    const auto t = DefaultTaxonomy();
    CHECK(t.model_dimensions.size() == 11);
    CHECK(t.garment_dimensions.size() == 13);
    CHECK(ValidateTaxonomy(t).empty());
  }

  TEST_CASE("shipped taxonomy file equals the built-in default") {
    CHECK(LoadTaxonomy(std::string(BENCHKIT_DATA_DIR) + "/taxonomy.default.json") ==
          DefaultTaxonomy());
  }

  TEST_CASE("json round trip") {
    const auto t = DefaultTaxonomy();
    CHECK(TaxonomyFromJson(ToJson(t)) == t);
  }

  TEST_CASE("duplicate dimension names and empty value lists are reported") {
    auto t = DefaultTaxonomy();
    t.model_dimensions.push_back(t.model_dimensions.front());
    t.garment_dimensions.push_back({"empty_dim", {}, false});
    const auto v = ValidateTaxonomy(t);
    REQUIRE(v.size() == 2);
    CHECK(v[0].dimension == "gender");
    CHECK(v[1].dimension == "empty_dim");
  }

  TEST_CASE("open dimensions accept any non-empty label") {
    const auto t = DefaultTaxonomy();
    const auto* sub = t.FindGarmentDimension("subcategory");
    REQUIRE(sub != nullptr);
    CHECK(sub->Accepts("wrap_midi_dress"));
    CHECK_FALSE(sub->Accepts(""));
    CHECK_FALSE(t.FindGarmentDimension("pattern")->Accepts("wrap_midi_dress"));
  }
}
