// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Python bindings. Structured values cross the boundary as JSON text and are
// decoded by the benchkit package wrapper.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "benchkit/catalog.hpp"
#include "benchkit/error.hpp"
#include "benchkit/generation.hpp"
#include "benchkit/gsb.hpp"
#include "benchkit/judge.hpp"
#include "benchkit/pairing.hpp"
#include "benchkit/report.hpp"
#include "benchkit/synthetic.hpp"
#include "benchkit/util.hpp"
#include "benchkit/version.hpp"

namespace py = pybind11;
using namespace benchkit;

namespace {

template <typename T, typename F>
std::vector<T> FromJsonLines(const std::string& text, F decode) {
  std::vector<T> out;
  const Json arr = Json::parse(text);
  for (const auto& j : arr) out.push_back(decode(j));
  return out;
}

template <typename T>
std::string ToJsonArray(const std::vector<T>& items) {
  Json arr = Json::array();
  for (const auto& i : items) arr.push_back(ToJson(i));
  return arr.dump();
}

Split ParseSplit(const std::string& s) {
  auto v = ParseEnum<Split>(s);
  if (!v) throw ConfigError("split must be single, multi or all");
  return *v;
}

}  // namespace

PYBIND11_MODULE(_benchkit, m) {
  m.doc() = "benchkit core bindings";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "BenchkitError");
  py::register_exception<ValidationError>(m, "ValidationError", m.attr("BenchkitError"));
  py::register_exception<DuplicateVoteError>(m, "DuplicateVoteError", m.attr("BenchkitError"));
  py::register_exception<UnknownTaskError>(m, "UnknownTaskError", m.attr("BenchkitError"));
  py::register_exception<InsufficientPoolError>(m, "InsufficientPoolError",
                                                m.attr("BenchkitError"));

  py::class_<Catalog>(m, "Catalog")
      .def_property_readonly("model_count", [](const Catalog& c) { return c.models().size(); })
      .def_property_readonly("garment_count", [](const Catalog& c) { return c.garments().size(); })
      .def("subcategory_count", &Catalog::SubcategoryCount)
      .def("serialize", &Catalog::Serialize);

  m.def("default_taxonomy", [] { return ToJson(DefaultTaxonomy()).dump(); });
  m.def(
      "load_catalog",
      [](const std::vector<std::string>& paths, const std::string& taxonomy) {
        return LoadCatalog(paths, taxonomy.empty() ? DefaultTaxonomy() : LoadTaxonomy(taxonomy));
      },
      py::arg("paths"), py::arg("taxonomy") = "");
  m.def(
      "synthetic_catalog",
      [](std::size_t models, std::size_t per_category, std::uint64_t seed) {
        SyntheticCatalogOptions o;
        o.models = models;
        o.garments_per_category = per_category;
        o.seed = seed;
        return MakeSyntheticCatalog(o);
      },
      py::arg("models") = 40, py::arg("garments_per_category") = 60, py::arg("seed") = 0);
  m.def("catalog_stats", [](const Catalog& c) { return ToJson(ComputeCatalogStats(c)).dump(); });
  m.def("render_stats", [](const Catalog& c) { return RenderStatsMarkdown(ComputeCatalogStats(c)); });

  m.def("compose_pairs", [](const Catalog& c, const std::string& config) {
    return ToJsonArray(ComposePairs(c, PairingConfigFromJson(Json::parse(config))));
  });
  m.def("validate_pair", [](const std::string& pair, const Catalog& c) {
    Json out = Json::array();
    for (const auto& v : ValidatePair(PairFromJson(Json::parse(pair)), c)) {
      out.push_back({{"code", v.code}, {"detail", v.detail}});
    }
    return out.dump();
  });
  m.def("build_prompt", [](const std::string& pair, const Catalog& c) {
    return BuildPrompt(PairFromJson(Json::parse(pair)), c);
  });

  m.def(
      "run_generation",
      [](const std::string& pairs, const Catalog& c, const std::string& system_id,
         const std::string& generator_spec) {
        const auto p = FromJsonLines<TryOnPair>(pairs, PairFromJson);
        auto gen = MakeGenerator(system_id, generator_spec);
        GenerationOptions opt;
        opt.retry.backoff_initial_s = 0.0;
        py::gil_scoped_release release;
        return ToJsonArray(RunGeneration(p, c, *gen, system_id, opt));
      },
      py::arg("pairs"), py::arg("catalog"), py::arg("system_id"), py::arg("generator_spec"));

  m.def("overall_score", &OverallScore, py::arg("identity"), py::arg("fidelity"),
        py::arg("background"), py::arg("physics"));
  m.def(
      "evaluate_benchmark",
      [](const std::string& pairs, const std::string& results, const std::string& system_id,
         const Catalog& c, const std::string& judge_spec) {
        const auto p = FromJsonLines<TryOnPair>(pairs, PairFromJson);
        const auto r = FromJsonLines<GenerationResult>(results, GenerationResultFromJson);
        auto judge = MakeJudge(judge_spec);
        py::gil_scoped_release release;
        const auto eval = EvaluateBenchmark(p, r, system_id, c, *judge, {}, nullptr);
        return Json{{"summary", ToJson(eval.summary)},
                    {"samples", Json::parse(ToJsonArray(eval.samples))}}
            .dump();
      },
      py::arg("pairs"), py::arg("results"), py::arg("system_id"), py::arg("catalog"),
      py::arg("judge_spec"));
  m.def(
      "summarize_evaluations",
      [](const std::string& samples, const std::string& system_id, const std::string& split) {
        const auto s = FromJsonLines<SampleEvaluation>(samples, SampleEvaluationFromJson);
        return ToJson(SummarizeEvaluations(system_id, s, ParseSplit(split))).dump();
      },
      py::arg("samples"), py::arg("system_id"), py::arg("split") = "all");
  m.def(
      "render_leaderboard",
      [](const std::string& samples, const std::string& split) {
        const auto s = FromJsonLines<SampleEvaluation>(samples, SampleEvaluationFromJson);
        std::map<std::string, std::vector<SampleEvaluation>> by_system;
        for (const auto& e : s) by_system[e.system_id].push_back(e);
        std::vector<BenchmarkSummary> summaries;
        for (const auto& [system, list] : by_system) {
          summaries.push_back(SummarizeEvaluations(system, list, ParseSplit(split)));
        }
        return RenderLeaderboardMarkdown(BuildLeaderboard(summaries, ParseSplit(split)));
      },
      py::arg("samples"), py::arg("split") = "single");

  m.def(
      "build_gsb_tasks",
      [](const std::string& pairs, const std::string& results, const std::string& a,
         const std::string& b, const Catalog& c, std::uint64_t seed) {
        const auto p = FromJsonLines<TryOnPair>(pairs, PairFromJson);
        const auto r = FromJsonLines<GenerationResult>(results, GenerationResultFromJson);
        const auto built = BuildGsbTasks(p, r, a, b, c, seed);
        return Json{{"tasks", Json::parse(ToJsonArray(built.tasks))}, {"skipped", built.skipped}}
            .dump();
      },
      py::arg("pairs"), py::arg("results"), py::arg("system_a"), py::arg("system_b"),
      py::arg("catalog"), py::arg("seed") = 0);
  m.def("rater_payload", [](const std::string& task) {
    return RaterPayload(GsbTaskFromJson(Json::parse(task)),
                        [](const std::string& uri) { return "/api/images/" + Sha256Hex(uri).substr(0, 32); })
        .dump();
  });
  m.def(
      "aggregate_gsb",
      [](const std::string& votes, const std::string& tasks, const std::string& reference) {
        const auto v = FromJsonLines<GsbVote>(votes, GsbVoteFromJson);
        const auto t = FromJsonLines<GsbTask>(tasks, GsbTaskFromJson);
        return ToJson(AggregateGsb(v, t, reference)).dump();
      },
      py::arg("votes"), py::arg("tasks"), py::arg("reference"));

  m.def("percentages_one_decimal",
        [](const std::vector<std::size_t>& counts) { return PercentagesOneDecimal(counts); });
  m.def("normalized_entropy", [](const std::vector<std::size_t>& counts, std::size_t vocab) {
    return NormalizedEntropy(counts, vocab);
  });
}
