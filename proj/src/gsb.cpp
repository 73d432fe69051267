// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/gsb.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <sstream>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

template <typename E>
E ParseOrThrow(const Json& j, const char* key, const std::string& id) {
  auto v = ParseEnum<E>(j.at(key).get<std::string>());
  if (!v) throw ValidationError(id, std::string("invalid ") + key);
  return *v;
}

std::string TaskIdFor(const std::string& a, const std::string& b, const std::string& pair_id) {
  return "task-" + Sha256Hex(a + '\n' + b + '\n' + pair_id).substr(0, 16);
}

// Per-task resolved outcome from the reference side.
struct Resolved {
  std::size_t garment_count;
  GsbOutcome outcome;
  std::size_t votes;
};

GsbRow MakeRow(std::size_t garment_count, std::span<const Resolved> items) {
  GsbRow row;
  row.garment_count = garment_count;
  for (const auto& r : items) {
    ++row.n;
    row.n_votes += r.votes;
    switch (r.outcome) {
      case GsbOutcome::kWin: ++row.win; break;
      case GsbOutcome::kSame: ++row.same; break;
      case GsbOutcome::kLoss: ++row.loss; break;
    }
  }
  const std::array<std::size_t, 3> counts{row.win, row.same, row.loss};
  const auto pct = PercentagesOneDecimal(counts);
  row.win_pct = pct[0];
  row.same_pct = pct[1];
  row.loss_pct = pct[2];
  return row;
}

ConfidenceInterval BootstrapWin(std::span<const Resolved> items, const GsbAggregateOptions& opt,
                                std::uint64_t salt) {
  Rng rng(opt.seed ^ (salt * 0x9E3779B97F4A7C15ULL));
  std::vector<double> rates;
  rates.reserve(opt.resamples);
  for (std::size_t r = 0; r < opt.resamples; ++r) {
    std::size_t wins = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[UniformIndex(rng, items.size())].outcome == GsbOutcome::kWin) ++wins;
    }
    rates.push_back(100.0 * static_cast<double>(wins) / static_cast<double>(items.size()));
  }
  return {RoundHalfUp(Percentile(rates, 0.025), 1), RoundHalfUp(Percentile(rates, 0.975), 1)};
}

Json RowToJson(const GsbRow& r) {
  Json j{{"garment_count", r.garment_count},
         {"n", r.n},
         {"n_votes", r.n_votes},
         {"win", r.win},
         {"same", r.same},
         {"loss", r.loss},
         {"win_pct", r.win_pct},
         {"same_pct", r.same_pct},
         {"loss_pct", r.loss_pct}};
  if (r.win_ci) j["win_ci95"] = {r.win_ci->lo, r.win_ci->hi};
  return j;
}

}  // namespace

Json ToJson(const GsbTask& t) {
  return Json{{"schema_version", kSchemaVersion},
              {"task_id", t.task_id},
              {"pair_id", t.pair_id},
              {"system_a", t.system_a},
              {"system_b", t.system_b},
              {"side_assignment", ToString(t.side)},
              {"garment_count", t.garment_count},
              {"status", ToString(t.status)},
              {"person_uri", t.person_uri},
              {"garment_uris", t.garment_uris},
              {"result_a_uri", t.result_a_uri},
              {"result_b_uri", t.result_b_uri}};
}

GsbTask GsbTaskFromJson(const Json& j) {
  GsbTask t;
  t.task_id = j.at("task_id").get<std::string>();
  t.pair_id = j.at("pair_id").get<std::string>();
  t.system_a = j.at("system_a").get<std::string>();
  t.system_b = j.at("system_b").get<std::string>();
  t.side = ParseOrThrow<SideAssignment>(j, "side_assignment", t.task_id);
  t.garment_count = j.at("garment_count").get<std::size_t>();
  t.status = j.contains("status") ? ParseOrThrow<TaskStatus>(j, "status", t.task_id)
                                  : TaskStatus::kOpen;
  t.person_uri = j.value("person_uri", "");
  t.garment_uris = j.value("garment_uris", std::vector<std::string>{});
  t.result_a_uri = j.value("result_a_uri", "");
  t.result_b_uri = j.value("result_b_uri", "");
  if (t.system_a == t.system_b) throw ValidationError(t.task_id, "system_a equals system_b");
  if (t.garment_count < 1 || t.garment_count > 6) {
    throw ValidationError(t.task_id, "garment_count outside 1..6");
  }
  return t;
}

std::vector<GsbTask> LoadGsbTasks(const std::string& path) {
  std::vector<GsbTask> out;
  ForEachJsonLine(path, [&](const Json& j, std::size_t line) {
    try {
      out.push_back(GsbTaskFromJson(j));
    } catch (const Json::exception& e) {
      throw ParseError(path, line, e.what());
    }
  });
  return out;
}

Json RaterPayload(const GsbTask& t, const ImageRefFn& image_ref) {
  Json garments = Json::array();
  for (const auto& uri : t.garment_uris) garments.push_back(image_ref(uri));
  return Json{{"task_id", t.task_id},
              {"person", image_ref(t.person_uri)},
              {"garments", garments},
              {"left", image_ref(t.left_uri())},
              {"right", image_ref(t.right_uri())},
              {"choices", Json::array({"left_better", "same", "right_better"})}};
}

GsbBuildResult BuildGsbTasks(std::span<const TryOnPair> pairs,
                             std::span<const GenerationResult> results,
                             const std::string& system_a, const std::string& system_b,
                             const Catalog& catalog, std::uint64_t seed) {
  if (system_a == system_b) throw ConfigError("GSB needs two distinct systems");
  std::map<std::string, const GenerationResult*> a, b;
  for (const auto& r : results) {
    if (r.status != GenerationStatus::kOk) continue;
    if (r.system_id == system_a) a[r.pair_id] = &r;
    if (r.system_id == system_b) b[r.pair_id] = &r;
  }
  Rng rng(seed);
  GsbBuildResult out;
  for (const auto& pair : pairs) {
    auto ia = a.find(pair.pair_id);
    auto ib = b.find(pair.pair_id);
    if (ia == a.end() || ib == b.end()) {
      ++out.skipped;
      out.skipped_pairs.push_back(pair.pair_id);
      continue;
    }
    const auto* model = catalog.FindModel(pair.model_image_id);
    if (model == nullptr) throw UnknownIdError(pair.model_image_id);
    GsbTask t;
    t.task_id = TaskIdFor(system_a, system_b, pair.pair_id);
    t.pair_id = pair.pair_id;
    t.system_a = system_a;
    t.system_b = system_b;
    t.side = UniformIndex(rng, 2) == 0 ? SideAssignment::kALeft : SideAssignment::kARight;
    t.garment_count = pair.item_count();
    t.person_uri = model->image_uri;
    for (const auto& item : PromptOrder(pair)) {
      const auto* g = catalog.FindGarment(item.garment_id);
      if (g == nullptr) throw UnknownIdError(item.garment_id);
      t.garment_uris.push_back(g->image_uri);
    }
    t.result_a_uri = ia->second->image_uri;
    t.result_b_uri = ib->second->image_uri;
    out.tasks.push_back(std::move(t));
  }
  return out;
}

Json ToJson(const GsbVote& v) {
  return Json{{"schema_version", kSchemaVersion},
              {"task_id", v.task_id},
              {"rater_id", v.rater_id},
              {"choice", ToString(v.choice)},
              {"timestamp_ms", v.timestamp_ms}};
}

GsbVote GsbVoteFromJson(const Json& j) {
  GsbVote v;
  v.task_id = j.at("task_id").get<std::string>();
  v.rater_id = j.at("rater_id").get<std::string>();
  v.choice = ParseOrThrow<GsbChoice>(j, "choice", v.task_id);
  v.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
  return v;
}

GsbOutcome OutcomeFor(const GsbTask& task, GsbChoice choice, const std::string& system) {
  if (system != task.system_a && system != task.system_b) {
    throw Error("system " + system + " is not part of task " + task.task_id);
  }
  if (choice == GsbChoice::kSame) return GsbOutcome::kSame;
  const bool left_won = choice == GsbChoice::kLeftBetter;
  const bool system_is_left = (system == task.system_a) == (task.side == SideAssignment::kALeft);
  return left_won == system_is_left ? GsbOutcome::kWin : GsbOutcome::kLoss;
}

// ---------------------------------------------------------------------------

GsbStore::GsbStore(std::vector<GsbTask> tasks, std::shared_ptr<Journal> journal,
                   std::size_t votes_per_task)
    : tasks_(std::move(tasks)), journal_(std::move(journal)), votes_per_task_(votes_per_task) {
  if (votes_per_task_ == 0) throw ConfigError("votes_per_task must be >= 1");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!index_.emplace(tasks_[i].task_id, i).second) throw DuplicateIdError(tasks_[i].task_id);
    tasks_[i].status = TaskStatus::kOpen;
  }
  if (!journal_) journal_ = std::make_shared<Journal>();
  for (const auto& rec : journal_->Records()) {
    auto v = GsbVoteFromJson(rec);
    if (!index_.contains(v.task_id) || raters_[v.task_id].contains(v.rater_id)) continue;
    Apply(v);
  }
}

void GsbStore::Apply(const GsbVote& vote) {
  auto& raters = raters_[vote.task_id];
  raters.insert(vote.rater_id);
  votes_.push_back(vote);
  if (raters.size() >= votes_per_task_) tasks_[index_.at(vote.task_id)].status = TaskStatus::kDone;
}

void GsbStore::RecordVote(const GsbVote& vote) {
  std::unique_lock lock(mu_);
  auto it = index_.find(vote.task_id);
  if (it == index_.end()) throw UnknownTaskError(vote.task_id);
  if (raters_[vote.task_id].contains(vote.rater_id)) {
    throw DuplicateVoteError(vote.task_id + "/" + vote.rater_id);
  }
  if (tasks_[it->second].status == TaskStatus::kDone) throw TaskClosedError(vote.task_id);
  journal_->Append(ToJson(vote));
  Apply(vote);
}

std::vector<GsbTask> GsbStore::Tasks() const {
  std::shared_lock lock(mu_);
  return tasks_;
}

std::vector<GsbVote> GsbStore::Votes() const {
  std::shared_lock lock(mu_);
  return votes_;
}

const GsbTask* GsbStore::Find(const std::string& task_id) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(task_id);
  return it == index_.end() ? nullptr : &tasks_[it->second];
}

bool GsbStore::HasVoted(const std::string& task_id, const std::string& rater_id) const {
  std::shared_lock lock(mu_);
  auto it = raters_.find(task_id);
  return it != raters_.end() && it->second.contains(rater_id);
}

TaskStatus GsbStore::Status(const std::string& task_id) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(task_id);
  if (it == index_.end()) throw UnknownTaskError(task_id);
  return tasks_[it->second].status;
}

// ---------------------------------------------------------------------------

const GsbRow* GsbComparison::Find(std::size_t garment_count) const {
  if (garment_count == 0) return &overall;
  for (const auto& r : buckets) {
    if (r.garment_count == garment_count) return &r;
  }
  return nullptr;
}

const GsbComparison* GsbSummary::Find(const std::string& opponent) const {
  for (const auto& c : comparisons) {
    if (c.opponent == opponent) return &c;
  }
  return nullptr;
}

GsbSummary AggregateGsb(std::span<const GsbVote> votes, std::span<const GsbTask> tasks,
                        const std::string& reference_system, const GsbAggregateOptions& options) {
  std::map<std::string, const GsbTask*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;

  // task -> {wins, sames, losses} from the reference side
  std::map<std::string, std::array<std::size_t, 3>> tally;
  for (const auto& v : votes) {
    auto it = by_id.find(v.task_id);
    if (it == by_id.end()) continue;
    const GsbTask& t = *it->second;
    if (t.system_a != reference_system && t.system_b != reference_system) continue;
    ++tally[t.task_id][static_cast<std::size_t>(OutcomeFor(t, v.choice, reference_system))];
  }

  std::map<std::string, std::vector<Resolved>> by_opponent;
  for (const auto& [task_id, c] : tally) {
    const GsbTask& t = *by_id.at(task_id);
    GsbOutcome o = GsbOutcome::kSame;
    const std::size_t w = c[0], l = c[2];
    if (w > l && w > c[1]) o = GsbOutcome::kWin;
    else if (l > w && l > c[1]) o = GsbOutcome::kLoss;
    const std::string& opponent = t.system_a == reference_system ? t.system_b : t.system_a;
    by_opponent[opponent].push_back({t.garment_count, o, c[0] + c[1] + c[2]});
  }

  GsbSummary out;
  out.reference_system = reference_system;
  for (auto& [opponent, items] : by_opponent) {
    GsbComparison cmp;
    cmp.reference = reference_system;
    cmp.opponent = opponent;
    cmp.overall = MakeRow(0, items);
    std::map<std::size_t, std::vector<Resolved>> buckets;
    for (const auto& r : items) buckets[r.garment_count].push_back(r);
    for (const auto& [k, rows] : buckets) cmp.buckets.push_back(MakeRow(k, rows));
    if (options.bootstrap) {
      const auto salt = std::hash<std::string>{}(opponent) & 0xFFFF;
      cmp.overall.win_ci = BootstrapWin(items, options, salt << 8);
      for (auto& row : cmp.buckets) {
        row.win_ci = BootstrapWin(buckets[row.garment_count], options, (salt << 8) | row.garment_count);
      }
    }
    out.comparisons.push_back(std::move(cmp));
  }
  return out;
}

Json ToJson(const GsbSummary& s) {
  Json comps = Json::array();
  for (const auto& c : s.comparisons) {
    Json buckets = Json::array();
    for (const auto& r : c.buckets) buckets.push_back(RowToJson(r));
    comps.push_back({{"reference", c.reference},
                     {"opponent", c.opponent},
                     {"overall", RowToJson(c.overall)},
                     {"buckets", buckets}});
  }
  return Json{{"reference_system", s.reference_system}, {"comparisons", comps}};
}

std::string GsbBarTable(const GsbSummary& s) {
  std::ostringstream os;
  os << "reference,opponent,garments,n,win_pct,same_pct,loss_pct\n";
  auto line = [&](const GsbComparison& c, const GsbRow& r) {
    os << c.reference << ',' << c.opponent << ','
       << (r.garment_count == 0 ? std::string("overall") : std::to_string(r.garment_count)) << ','
       << r.n << ',' << FormatFixed(r.win_pct, 1) << ',' << FormatFixed(r.same_pct, 1) << ','
       << FormatFixed(r.loss_pct, 1) << '\n';
  };
  for (const auto& c : s.comparisons) {
    for (const auto& r : c.buckets) line(c, r);
    line(c, c.overall);
  }
  return os.str();
}

}  // namespace benchkit
