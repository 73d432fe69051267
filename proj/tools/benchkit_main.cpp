// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// benchkit command-line entry point.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "benchkit/adapters.hpp"
#include "benchkit/catalog.hpp"
#include "benchkit/curation.hpp"
#include "benchkit/error.hpp"
#include "benchkit/generation.hpp"
#include "benchkit/gsb.hpp"
#include "benchkit/judge.hpp"
#include "benchkit/pairing.hpp"
#include "benchkit/report.hpp"
#include "benchkit/server.hpp"
#include "benchkit/synthetic.hpp"
#include "benchkit/util.hpp"
#include "benchkit/version.hpp"

namespace fs = std::filesystem;
using namespace benchkit;

namespace {

// Every command that writes an output also writes <output>.meta.json with
// the seeds, adapter specs and input hashes that produced it; `report` folds
// these into the bundle's provenance block.
std::string MetaPath(const std::string& out) { return out + ".meta.json"; }

void WriteMeta(const std::string& out, const std::string& command, Json fields) {
  fields["command"] = command;
  fields["tool_version"] = kVersion;
  WriteFile(MetaPath(out), fields.dump(2) + "\n");
}

Json HashInputs(const std::vector<std::string>& paths) {
  Json j = Json::object();
  for (const auto& p : paths) {
    if (!p.empty()) j[fs::path(p).filename().string()] = Sha256File(p);
  }
  return j;
}

TagTaxonomy TaxonomyOrDefault(const std::string& path) {
  return path.empty() ? DefaultTaxonomy() : LoadTaxonomy(path);
}

void RequireFresh(const std::string& journal, bool resume) {
  std::error_code ec;
  if (!resume && fs::exists(journal, ec) && fs::file_size(journal, ec) > 0) {
    throw ConfigError(journal + " already exists; pass --resume to continue it");
  }
}

/// Seeds recorded in an input's sidecar, so they follow the data downstream.
Json InheritedSeeds(const std::vector<std::string>& inputs) {
  Json seeds = Json::object();
  for (const auto& p : inputs) {
    std::error_code ec;
    if (!fs::exists(MetaPath(p), ec)) continue;
    const Json meta = Json::parse(ReadFile(MetaPath(p)));
    seeds.update(meta.value("seeds", Json::object()));
  }
  return seeds;
}

std::vector<GenerationResult> LoadResults(const std::vector<std::string>& paths) {
  std::vector<GenerationResult> out;
  for (const auto& p : paths) {
    auto r = LoadGenerationResults(p);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark construction and evaluation for multi-reference virtual try-on"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // synth ------------------------------------------------------------------
  SyntheticCatalogOptions synth_opt;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic catalog manifest");
  synth->add_option("--out", synth_out, "Output manifest (.jsonl)")->required();
  synth->add_option("--models", synth_opt.models);
  synth->add_option("--garments-per-category", synth_opt.garments_per_category);
  synth->add_option("--subcategories-per-category", synth_opt.subcategories_per_category);
  synth->add_option("--seed", synth_opt.seed);

  // catalog ----------------------------------------------------------------
  std::vector<std::string> manifests;
  std::string taxonomy_path, stats_format = "md", stats_out;
  auto* catalog_cmd = app.add_subcommand("catalog", "Validate manifests or report statistics");
  catalog_cmd->require_subcommand(1);
  auto* validate = catalog_cmd->add_subcommand("validate", "Load and validate manifests");
  validate->add_option("manifests", manifests)->required();
  validate->add_option("--taxonomy", taxonomy_path);
  auto* stats = catalog_cmd->add_subcommand("stats", "Distribution statistics");
  stats->add_option("manifests", manifests)->required();
  stats->add_option("--taxonomy", taxonomy_path);
  stats->add_option("--format", stats_format)->check(CLI::IsMember({"md", "json"}));
  stats->add_option("--out", stats_out, "Write to file instead of stdout");

  // curate -----------------------------------------------------------------
  std::string cur_catalog, cur_stage, cur_journal, cur_out, cur_rules, cur_analyzer, cur_tagger,
      cur_swapper, cur_verifier, cur_bank;
  bool cur_resume = false;
  int cur_retries = 2;
  AnonymizationConfig anon_cfg;
  auto* curate = app.add_subcommand("curate", "Curation pipeline stages");
  curate->require_subcommand(1);
  auto* curate_run = curate->add_subcommand("run", "Run one curation stage");
  curate_run->add_option("--catalog", cur_catalog)->required();
  curate_run->add_option("--taxonomy", taxonomy_path);
  curate_run->add_option("--stage", cur_stage)
      ->required()
      ->check(CLI::IsMember({"filter", "tag", "anonymize"}));
  curate_run->add_option("--journal", cur_journal)->required();
  curate_run->add_flag("--resume", cur_resume, "Continue an existing journal");
  curate_run->add_option("--rules", cur_rules, "Filter rule set (JSON)");
  curate_run->add_option("--analyzer", cur_analyzer);
  curate_run->add_option("--tagger", cur_tagger);
  curate_run->add_option("--max-retries", cur_retries);
  curate_run->add_option("--swapper", cur_swapper);
  curate_run->add_option("--verifier", cur_verifier);
  curate_run->add_option("--surrogates", cur_bank, "Surrogate face bank (.jsonl)");
  curate_run->add_option("--max-loops", anon_cfg.max_loops);
  curate_run->add_option("--max-parallel", anon_cfg.max_parallel);
  curate_run->add_option("--out", cur_out, "Stage output (.jsonl); anonymize writes a new catalog");

  // pair -------------------------------------------------------------------
  std::string pair_catalog, pair_config, pair_out;
  std::optional<std::uint64_t> pair_seed;
  std::optional<std::size_t> pair_target;
  auto* pair = app.add_subcommand("pair", "Compose try-on pairs");
  pair->add_option("--catalog", pair_catalog)->required();
  pair->add_option("--taxonomy", taxonomy_path);
  pair->add_option("--config", pair_config, "Pairing config (JSON)");
  pair->add_option("--seed", pair_seed);
  pair->add_option("--target", pair_target, "Target pair count");
  pair->add_option("--out", pair_out)->required();

  // gen --------------------------------------------------------------------
  std::string gen_catalog, gen_pairs, gen_system, gen_spec, gen_out;
  bool gen_resume = false;
  GenerationOptions gen_opt;
  auto* gen = app.add_subcommand("gen", "Run a generator over all pairs");
  gen->add_option("--catalog", gen_catalog)->required();
  gen->add_option("--taxonomy", taxonomy_path);
  gen->add_option("--pairs", gen_pairs)->required();
  gen->add_option("--system", gen_system)->required();
  gen->add_option("--generator", gen_spec, "mock:<fixture> or URL (default: env)");
  gen->add_option("--out", gen_out, "Result journal (.jsonl)")->required();
  gen->add_flag("--resume", gen_resume);
  gen->add_option("--max-parallel", gen_opt.max_parallel);
  gen->add_option("--max-retries", gen_opt.retry.max_retries);
  gen->add_option("--backoff", gen_opt.retry.backoff_initial_s);
  gen->add_option("--image-dir", gen_opt.image_dir);

  // latency ----------------------------------------------------------------
  std::string lat_catalog, lat_pairs, lat_system, lat_spec, lat_journal, lat_out;
  LatencyOptions lat_opt;
  auto* latency = app.add_subcommand("latency", "Time a generator by reference-image count");
  latency->add_option("--catalog", lat_catalog)->required();
  latency->add_option("--taxonomy", taxonomy_path);
  latency->add_option("--pairs", lat_pairs)->required();
  latency->add_option("--system", lat_system)->required();
  latency->add_option("--generator", lat_spec);
  latency->add_option("--journal", lat_journal, "Raw sample journal (.jsonl)")->required();
  latency->add_option("--warmup", lat_opt.warmup);
  latency->add_option("--repeats", lat_opt.repeats);
  latency->add_option("--out", lat_out, "Summary (.json)");

  // judge ------------------------------------------------------------------
  std::string judge_catalog, judge_pairs, judge_system, judge_spec, judge_out, prompt_dir,
      prompt_version = "v1", fidelity_rule = "mean";
  std::vector<std::string> judge_results;
  bool judge_resume = false;
  JudgeProtocolConfig judge_cfg;
  auto* judge = app.add_subcommand("judge", "Score a system's results with the VLM judge");
  judge->add_option("--catalog", judge_catalog)->required();
  judge->add_option("--taxonomy", taxonomy_path);
  judge->add_option("--pairs", judge_pairs)->required();
  judge->add_option("--results", judge_results)->required();
  judge->add_option("--system", judge_system)->required();
  judge->add_option("--judge", judge_spec, "mock:<fixture>, synthetic[:seed] or URL");
  judge->add_option("--out", judge_out, "Evaluation journal (.jsonl)")->required();
  judge->add_flag("--resume", judge_resume);
  judge->add_option("--prompts", prompt_dir, "Directory with <stage>.<version>.txt templates");
  judge->add_option("--prompt-version", prompt_version);
  judge->add_option("--fidelity", fidelity_rule)->check(CLI::IsMember({"mean", "min"}));
  judge->add_option("--max-retries", judge_cfg.max_parse_retries);
  judge->add_option("--max-parallel", judge_cfg.max_parallel);

  // gsb --------------------------------------------------------------------
  std::string gsb_catalog, gsb_pairs, gsb_a, gsb_b, gsb_out, gsb_tasks, gsb_votes, gsb_ref,
      gsb_table;
  std::vector<std::string> gsb_results;
  std::uint64_t gsb_seed = 0;
  GsbAggregateOptions gsb_agg;
  auto* gsb = app.add_subcommand("gsb", "Good/Same/Bad preference studies");
  gsb->require_subcommand(1);
  auto* gsb_build = gsb->add_subcommand("build", "Build anonymized comparison tasks");
  gsb_build->add_option("--catalog", gsb_catalog)->required();
  gsb_build->add_option("--taxonomy", taxonomy_path);
  gsb_build->add_option("--pairs", gsb_pairs)->required();
  gsb_build->add_option("--results", gsb_results)->required();
  gsb_build->add_option("--system-a", gsb_a)->required();
  gsb_build->add_option("--system-b", gsb_b)->required();
  gsb_build->add_option("--seed", gsb_seed);
  gsb_build->add_option("--out", gsb_out)->required();
  auto* gsb_aggregate = gsb->add_subcommand("aggregate", "Summarize votes");
  gsb_aggregate->add_option("--tasks", gsb_tasks)->required();
  gsb_aggregate->add_option("--votes", gsb_votes)->required();
  gsb_aggregate->add_option("--reference", gsb_ref)->required();
  gsb_aggregate->add_flag("--bootstrap", gsb_agg.bootstrap, "Add 95% bootstrap CIs on win rate");
  gsb_aggregate->add_option("--resamples", gsb_agg.resamples);
  gsb_aggregate->add_option("--seed", gsb_agg.seed);
  gsb_aggregate->add_option("--out", gsb_out, "Summary (.json)")->required();
  gsb_aggregate->add_option("--table", gsb_table, "Stacked-bar data table (.csv)");

  // report -----------------------------------------------------------------
  std::vector<std::string> rep_evals, rep_latency, rep_manifests;
  std::string rep_out, rep_format = "md,structured", rep_gsb_tasks, rep_gsb_votes, rep_gsb_ref;
  auto* report = app.add_subcommand("report", "Render leaderboards and summaries");
  report->add_option("--evals", rep_evals, "Evaluation journals")->required();
  report->add_option("--out", rep_out)->required();
  report->add_option("--format", rep_format);
  report->add_option("--catalog", rep_manifests, "Manifests for the statistics section");
  report->add_option("--taxonomy", taxonomy_path);
  report->add_option("--latency", rep_latency, "Latency sample journals");
  report->add_option("--gsb-tasks", rep_gsb_tasks);
  report->add_option("--gsb-votes", rep_gsb_votes);
  report->add_option("--gsb-reference", rep_gsb_ref);

  // serve ------------------------------------------------------------------
  ServerConfig srv;
  auto* serve = app.add_subcommand("serve", "HTTP API for results and GSB rating");
  serve->add_option("--data-dir", srv.data_dir);
  serve->add_option("--bind", srv.bind_address);
  serve->add_option("--port", srv.port);
  serve->add_option("--session-ttl", srv.session_ttl_s, "Idle seconds before a session expires");
  serve->add_option("--seed", srv.seed);
  serve->add_option("--study", srv.study_id);
  serve->add_option("--votes-per-task", srv.votes_per_task);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto catalog = MakeSyntheticCatalog(synth_opt);
      WriteFile(synth_out, catalog.Serialize());
      WriteMeta(synth_out, "synth", {{"seeds", {{"synth", synth_opt.seed}}}});
      std::cerr << "wrote " << catalog.models().size() << " models, "
                << catalog.garments().size() << " garments to " << synth_out << "\n";
    } else if (*validate) {
      const auto catalog = LoadCatalog(manifests, TaxonomyOrDefault(taxonomy_path));
      std::cout << "ok: " << catalog.models().size() << " models, " << catalog.garments().size()
                << " garments, " << catalog.SubcategoryCount() << " subcategories\n";
    } else if (*stats) {
      const auto report_stats =
          ComputeCatalogStats(LoadCatalog(manifests, TaxonomyOrDefault(taxonomy_path)));
      const std::string text = stats_format == "json" ? ToJson(report_stats).dump(2) + "\n"
                                                      : RenderStatsMarkdown(report_stats);
      if (stats_out.empty()) std::cout << text;
      else WriteFile(stats_out, text);
    } else if (*curate_run) {
      const auto catalog = LoadCatalog({cur_catalog}, TaxonomyOrDefault(taxonomy_path));
      RequireFresh(cur_journal, cur_resume);
      CurationJournal journal(cur_journal);
      if (cur_stage == "filter") {
        const FilterRuleSet rules =
            cur_rules.empty() ? FilterRuleSet{} : FilterRuleSetFromJson(Json::parse(ReadFile(cur_rules)));
        auto analyzer = MakeMediaAnalyzer(cur_analyzer);
        const auto entries = EntriesFromCatalog(catalog);
        const auto part = ApplyFilters(entries, rules, *analyzer, &journal);
        std::cout << "accepted " << part.accepted.size() << ", rejected " << part.rejected.size()
                  << ", undetermined " << part.undetermined.size() << "\n";
        if (!cur_out.empty()) {
          std::vector<Json> rows;
          for (const auto& id : part.accepted) rows.push_back({{"id", id}, {"status", "accepted"}});
          for (const auto& r : part.rejected) {
            rows.push_back({{"id", r.entry_id}, {"status", "rejected"}, {"failed_rules", r.failed_rules}});
          }
          for (const auto& id : part.undetermined) rows.push_back({{"id", id}, {"status", "undetermined"}});
          WriteJsonLines(cur_out, rows);
        }
      } else if (cur_stage == "tag") {
        auto tagger = MakeTagger(cur_tagger);
        const auto proposals = RunTagging(catalog, *tagger, cur_retries, &journal);
        std::size_t review = 0, failed = 0;
        std::vector<Json> rows;
        for (const auto& p : proposals) {
          review += p.needs_review.empty() ? 0 : 1;
          failed += p.status == TagProposal::Status::kFailed ? 1 : 0;
          rows.push_back(ToJson(p));
        }
        if (!cur_out.empty()) WriteJsonLines(cur_out, rows);
        std::cout << proposals.size() << " proposals, " << review << " need review, " << failed
                  << " failed\n";
      } else {
        if (cur_bank.empty()) throw ConfigError("--surrogates is required for the anonymize stage");
        const auto bank = LoadSurrogateBank(cur_bank);
        auto swapper = MakeSwapper(cur_swapper);
        auto verifier = MakeVerifier(cur_verifier);
        const auto outcomes =
            RunAnonymization(catalog.models(), bank, *swapper, *verifier, anon_cfg, &journal);
        std::map<std::string, std::size_t> counts;
        for (const auto& o : outcomes) ++counts[std::string(ToString(o.status))];
        for (const auto& [k, v] : counts) std::cout << k << ": " << v << "\n";
        if (!cur_out.empty()) WriteFile(cur_out, ApplyAnonymization(catalog, outcomes).Serialize());
      }
    } else if (*pair) {
      const auto catalog = LoadCatalog({pair_catalog}, TaxonomyOrDefault(taxonomy_path));
      PairingConfig cfg;
      if (!pair_config.empty()) cfg = PairingConfigFromJson(Json::parse(ReadFile(pair_config)));
      if (pair_seed) cfg.seed = *pair_seed;
      if (pair_target) cfg.target_pair_count = *pair_target;
      const auto pairs = ComposePairs(catalog, cfg);
      WriteFile(pair_out, SerializePairs(pairs));
      WriteMeta(pair_out, "pair",
                {{"seeds", {{"pairing", cfg.seed}}},
                 {"config_hashes", {{"pairing", Sha256Hex(ToJson(cfg).dump())}}},
                 {"input_hashes", HashInputs({pair_catalog})}});
      const auto planned = PlannedItemCounts(cfg);
      std::cout << "wrote " << pairs.size() << " pairs; planned per item count:";
      for (auto n : planned) std::cout << ' ' << n;
      std::cout << "\n";
    } else if (*gen) {
      const auto catalog = LoadCatalog({gen_catalog}, TaxonomyOrDefault(taxonomy_path));
      const auto pairs = LoadPairs(gen_pairs);
      RequireFresh(gen_out, gen_resume);
      Journal journal(gen_out);
      auto generator = MakeGenerator(gen_system, gen_spec);
      const auto results = RunGeneration(pairs, catalog, *generator, gen_system, gen_opt, &journal);
      std::size_t ok = 0;
      for (const auto& r : results) ok += r.status == GenerationStatus::kOk ? 1 : 0;
      WriteMeta(gen_out, "gen",
                {{"adapter_versions",
                  {{"generator_" + gen_system, ResolveAdapterSpec(gen_spec, "generator_" + gen_system)}}},
                 {"input_hashes", HashInputs({gen_catalog, gen_pairs})}});
      std::cout << ok << "/" << results.size() << " ok\n";
    } else if (*latency) {
      const auto catalog = LoadCatalog({lat_catalog}, TaxonomyOrDefault(taxonomy_path));
      const auto pairs = LoadPairs(lat_pairs);
      Journal journal(lat_journal);
      auto generator = MakeGenerator(lat_system, lat_spec);
      const auto run = RunLatencyBench(pairs, catalog, *generator, lat_system, lat_opt, &journal);
      const std::string text = ToJson(run.summary).dump(2) + "\n";
      if (lat_out.empty()) std::cout << text;
      else WriteFile(lat_out, text);
      WriteMeta(lat_journal, "latency",
                {{"adapter_versions",
                  {{"generator_" + lat_system, ResolveAdapterSpec(lat_spec, "generator_" + lat_system)}}},
                 {"latency", {{"warmup", lat_opt.warmup}, {"repeats", lat_opt.repeats}}}});
    } else if (*judge) {
      const auto catalog = LoadCatalog({judge_catalog}, TaxonomyOrDefault(taxonomy_path));
      const auto pairs = LoadPairs(judge_pairs);
      const auto results = LoadResults(judge_results);
      judge_cfg.templates = prompt_dir.empty() ? DefaultPromptTemplates()
                                               : LoadPromptTemplates(prompt_dir, prompt_version);
      judge_cfg.fidelity_rule = *ParseEnum<FidelityAggregation>(fidelity_rule);
      RequireFresh(judge_out, judge_resume);
      Journal journal(judge_out);
      auto client = MakeJudge(judge_spec);
      const auto eval =
          EvaluateBenchmark(pairs, results, judge_system, catalog, *client, judge_cfg, &journal);
      WriteMeta(judge_out, "judge",
                {{"adapter_versions", {{"judge", ResolveAdapterSpec(judge_spec, "judge")}}},
                 {"prompt_versions", {{"judge", judge_cfg.templates.version}}},
                 {"seeds", InheritedSeeds({judge_catalog, judge_pairs})},
                 {"config_hashes",
                  {{"judge_prompts", Sha256Hex(judge_cfg.templates.stage1 + judge_cfg.templates.stage2 +
                                               judge_cfg.templates.limb_recheck)}}},
                 {"input_hashes", HashInputs({judge_catalog, judge_pairs})}});
      std::cout << ToJson(eval.summary).dump(2) << "\n";
    } else if (*gsb_build) {
      const auto catalog = LoadCatalog({gsb_catalog}, TaxonomyOrDefault(taxonomy_path));
      const auto built = BuildGsbTasks(LoadPairs(gsb_pairs), LoadResults(gsb_results), gsb_a,
                                       gsb_b, catalog, gsb_seed);
      std::vector<Json> rows;
      for (const auto& t : built.tasks) rows.push_back(ToJson(t));
      WriteJsonLines(gsb_out, rows);
      WriteMeta(gsb_out, "gsb build", {{"seeds", {{"gsb_sides", gsb_seed}}}});
      std::cout << built.tasks.size() << " tasks, " << built.skipped << " pairs skipped\n";
    } else if (*gsb_aggregate) {
      const auto tasks = LoadGsbTasks(gsb_tasks);
      std::vector<GsbVote> votes;
      for (const auto& j : ReadJsonLines(gsb_votes)) votes.push_back(GsbVoteFromJson(j));
      const auto summary = AggregateGsb(votes, tasks, gsb_ref, gsb_agg);
      WriteFile(gsb_out, ToJson(summary).dump(2) + "\n");
      if (!gsb_table.empty()) WriteFile(gsb_table, GsbBarTable(summary));
      std::cout << RenderGsbMarkdown(summary);
    } else if (*report) {
      ReportBundle bundle;
      std::vector<SampleEvaluation> evals;
      for (const auto& p : rep_evals) {
        auto e = LoadEvaluations(p);
        evals.insert(evals.end(), e.begin(), e.end());
      }
      std::map<std::string, std::vector<SampleEvaluation>> by_system;
      for (auto& e : evals) by_system[e.system_id].push_back(std::move(e));
      for (const auto& [system, list] : by_system) {
        for (Split s : {Split::kSingle, Split::kMulti}) {
          bundle.summaries.push_back(SummarizeEvaluations(system, list, s));
        }
      }
      if (!rep_manifests.empty()) {
        bundle.stats = ComputeCatalogStats(LoadCatalog(rep_manifests, TaxonomyOrDefault(taxonomy_path)));
      }
      if (!rep_latency.empty()) {
        std::map<std::string, std::vector<LatencySample>> samples;
        for (const auto& p : rep_latency) {
          for (const auto& j : ReadJsonLines(p)) {
            samples[j.value("system_id", "")].push_back(LatencySampleFromJson(j));
          }
        }
        bundle.latency.emplace();
        for (const auto& [system, list] : samples) {
          bundle.latency->push_back(SummarizeLatency(system, list));
        }
      }
      if (!rep_gsb_tasks.empty() || !rep_gsb_votes.empty()) {
        if (rep_gsb_tasks.empty() || rep_gsb_votes.empty() || rep_gsb_ref.empty()) {
          throw ConfigError("--gsb-tasks, --gsb-votes and --gsb-reference go together");
        }
        std::vector<GsbVote> votes;
        for (const auto& j : ReadJsonLines(rep_gsb_votes)) votes.push_back(GsbVoteFromJson(j));
        bundle.gsb = AggregateGsb(votes, LoadGsbTasks(rep_gsb_tasks), rep_gsb_ref);
      }
      Provenance& prov = bundle.provenance;
      prov.tool_version = kVersion;
      std::vector<std::string> inputs = rep_evals;
      inputs.insert(inputs.end(), rep_manifests.begin(), rep_manifests.end());
      inputs.insert(inputs.end(), rep_latency.begin(), rep_latency.end());
      if (!rep_gsb_tasks.empty()) inputs.insert(inputs.end(), {rep_gsb_tasks, rep_gsb_votes});
      for (const auto& p : inputs) {
        prov.input_hashes[fs::path(p).filename().string()] = Sha256File(p);
        std::error_code ec;
        if (!fs::exists(MetaPath(p), ec)) continue;
        const Json meta = Json::parse(ReadFile(MetaPath(p)));
        auto merge = [&](const char* key, auto& into, bool overwrite) {
          const Json section = meta.value(key, Json::object());
          for (const auto& [k, v] : section.items()) {
            if (overwrite) into[k] = v;
            else into.emplace(k, v);
          }
        };
        merge("seeds", prov.seeds, true);
        merge("config_hashes", prov.config_hashes, true);
        merge("adapter_versions", prov.adapter_versions, true);
        merge("prompt_versions", prov.prompt_versions, true);
        merge("input_hashes", prov.input_hashes, false);
      }
      for (const auto& path : ExportBundle(bundle, rep_out, ParseReportFormats(rep_format))) {
        std::cout << "wrote " << path << "\n";
      }
    } else if (*serve) {
      srv.ApplyEnvironment();
      auto service = std::make_shared<ApiService>(srv);
      BenchServer server(service);
      const int port = server.Bind(srv.bind_address, srv.port);
      std::cerr << "listening on " << srv.bind_address << ":" << port << "\n";
      server.Listen();
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error [" << e.id() << "]: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
