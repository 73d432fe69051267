// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/pairing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "benchkit/error.hpp"

namespace benchkit {

Slot SlotFor(Category category) {
  switch (category) {
    case Category::kTop: return Slot::kTop;
    case Category::kPants:
    case Category::kSkirt: return Slot::kBottom;
    case Category::kDress: return Slot::kDress;
    case Category::kCoat: return Slot::kOuter;
    case Category::kShoes: return Slot::kShoes;
    case Category::kHat: return Slot::kHat;
    case Category::kBag: return Slot::kBag;
  }
  return Slot::kTop;
}

std::string SlotSetString(SlotSet set) {
  std::string out = "{";
  for (std::size_t i = 0; i < EnumCount<Slot>(); ++i) {
    if (set & SlotBit(static_cast<Slot>(i))) {
      if (out.size() > 1) out += ", ";
      out += ToString(static_cast<Slot>(i));
    }
  }
  return out + "}";
}

bool SlotModel::Allows(SlotSet set) const {
  for (const auto& [a, b] : exclusions) {
    if ((set & SlotBit(a)) && (set & SlotBit(b))) return false;
  }
  return true;
}

std::vector<SlotSet> FeasibleSlotSets(std::size_t size, const SlotModel& model) {
  std::vector<SlotSet> out;
  const unsigned n = static_cast<unsigned>(EnumCount<Slot>());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
    if (model.Allows(static_cast<SlotSet>(mask))) out.push_back(static_cast<SlotSet>(mask));
  }
  return out;
}

// ---------------------------------------------------------------------------

Json ToJson(const TryOnPair& pair) {
  Json items = Json::array();
  for (const auto& it : pair.items) {
    Json j{{"garment_id", it.garment_id}, {"slot", ToString(it.slot)}};
    if (!it.layer_directive.empty()) j["layer_directive"] = it.layer_directive;
    items.push_back(std::move(j));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"pair_id", pair.pair_id},
              {"model_image_id", pair.model_image_id},
              {"item_count", pair.item_count()},
              {"items", items}};
}

TryOnPair PairFromJson(const Json& j) {
  TryOnPair p;
  p.pair_id = j.at("pair_id").get<std::string>();
  p.model_image_id = j.at("model_image_id").get<std::string>();
  for (const auto& it : j.at("items")) {
    PairItem item;
    item.garment_id = it.at("garment_id").get<std::string>();
    auto slot = ParseEnum<Slot>(it.at("slot").get<std::string>());
    if (!slot) throw ValidationError(p.pair_id, "unknown slot " + it.at("slot").dump());
    item.slot = *slot;
    item.layer_directive = it.value("layer_directive", "");
    p.items.push_back(std::move(item));
  }
  return p;
}

std::vector<TryOnPair> LoadPairs(const std::string& path) {
  std::vector<TryOnPair> out;
  ForEachJsonLine(path, [&](const Json& j, std::size_t line) {
    try {
      out.push_back(PairFromJson(j));
    } catch (const Json::exception& e) {
      throw ParseError(path, line, e.what());
    }
  });
  return out;
}

std::string SerializePairs(std::span<const TryOnPair> pairs) {
  std::vector<Json> records;
  records.reserve(pairs.size());
  for (const auto& p : pairs) records.push_back(ToJson(p));
  return DumpJsonLines(records);
}

// ---------------------------------------------------------------------------

std::vector<std::string> PairingConfig::Validate() const {
  std::vector<std::string> out;
  double sum = 0;
  for (double w : item_count_weights) {
    if (w < 0 || !std::isfinite(w)) out.push_back("item_count_weights must be finite and >= 0");
    sum += w;
  }
  if (sum <= 0) out.push_back("item_count_weights must not all be zero");
  if (garment_use_cap == 0) out.push_back("garment_use_cap must be >= 1");
  return out;
}

PairingConfig PairingConfigFromJson(const Json& j) {
  PairingConfig c;
  try {
    c.target_pair_count = j.value("target_pair_count", c.target_pair_count);
    if (auto w = j.find("item_count_weights"); w != j.end()) {
      if (!w->is_array() || w->size() != kMaxItems) {
        throw ConfigError("item_count_weights must list 6 weights (1..6 items)");
      }
      for (std::size_t i = 0; i < kMaxItems; ++i) c.item_count_weights[i] = (*w)[i].get<double>();
    }
    c.diversity_dimensions = j.value("diversity_dimensions", c.diversity_dimensions);
    c.seed = j.value("seed", c.seed);
    c.garment_use_cap = j.value("garment_use_cap", c.garment_use_cap);
    c.model_use_cap = j.value("model_use_cap", c.model_use_cap);
    c.assign_directives = j.value("assign_directives", c.assign_directives);
    if (auto ex = j.find("exclusions"); ex != j.end()) {
      c.slot_model.exclusions.clear();
      for (const auto& e : *ex) {
        auto a = ParseEnum<Slot>(e.at(0).get<std::string>());
        auto b = ParseEnum<Slot>(e.at(1).get<std::string>());
        if (!a || !b) throw ConfigError("unknown slot in exclusions: " + e.dump());
        c.slot_model.exclusions.emplace_back(*a, *b);
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed pairing config: ") + e.what());
  }
  if (auto v = c.Validate(); !v.empty()) throw ConfigError("invalid pairing config: " + v.front());
  return c;
}

Json ToJson(const PairingConfig& c) {
  Json ex = Json::array();
  for (const auto& [a, b] : c.slot_model.exclusions) ex.push_back({ToString(a), ToString(b)});
  return Json{{"target_pair_count", c.target_pair_count},
              {"item_count_weights", c.item_count_weights},
              {"diversity_dimensions", c.diversity_dimensions},
              {"seed", c.seed},
              {"garment_use_cap", c.garment_use_cap},
              {"model_use_cap", c.model_use_cap},
              {"assign_directives", c.assign_directives},
              {"exclusions", ex}};
}

std::array<std::size_t, kMaxItems> PlannedItemCounts(const PairingConfig& config) {
  const auto counts = Apportion(config.target_pair_count, config.item_count_weights);
  std::array<std::size_t, kMaxItems> out{};
  std::copy(counts.begin(), counts.end(), out.begin());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool DirectiveAllowed(const PairItem& item, SlotSet present) {
  const auto& d = item.layer_directive;
  if (d.empty()) return true;
  if (item.slot == Slot::kOuter) {
    const bool has_inner = present & (SlotBit(Slot::kTop) | SlotBit(Slot::kDress));
    return has_inner && (d == kDirectiveOpen || d == kDirectiveClosed);
  }
  if (item.slot == Slot::kTop) {
    return (present & SlotBit(Slot::kBottom)) && (d == kDirectiveTucked || d == kDirectiveUntucked);
  }
  return false;
}

}  // namespace

std::vector<PairViolation> ValidatePair(const TryOnPair& pair, const Catalog& catalog,
                                        const SlotModel& slot_model) {
  std::vector<PairViolation> out;
  const ModelImage* model = catalog.FindModel(pair.model_image_id);
  if (model == nullptr) throw UnknownIdError(pair.model_image_id);
  std::vector<const GarmentItem*> garments;
  for (const auto& item : pair.items) {
    const GarmentItem* g = catalog.FindGarment(item.garment_id);
    if (g == nullptr) throw UnknownIdError(item.garment_id);
    garments.push_back(g);
  }

  if (pair.item_count() < kMinItems || pair.item_count() > kMaxItems) {
    out.push_back({std::string(kViolationCount),
                   "item_count " + std::to_string(pair.item_count()) + " outside 1..6"});
  }
  if (!model->EligibleForPairing()) {
    out.push_back({std::string(kViolationModelNotVerified),
                   "model '" + model->id + "' is " + std::string(ToString(model->anonymization))});
  }
  SlotSet present = 0;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < pair.items.size(); ++i) {
    const auto& item = pair.items[i];
    const auto* g = garments[i];
    if (SlotFor(g->category) != item.slot) {
      out.push_back({std::string(kViolationSlotMismatch),
                     g->id + " (" + std::string(ToString(g->category)) + ") placed in " +
                         std::string(ToString(item.slot))});
    }
    if (present & SlotBit(item.slot)) {
      out.push_back({std::string(kViolationSlotConflict),
                     "slot " + std::string(ToString(item.slot)) + " used twice"});
    }
    present |= SlotBit(item.slot);
    if (!seen_ids.insert(g->id).second) {
      out.push_back({std::string(kViolationDuplicateGarment), g->id});
    }
    if (!g->FitsGender(model->gender)) {
      out.push_back({std::string(kViolationGender),
                     g->id + " is " + std::string(ToString(g->gender_compat)) + ", model is " +
                         std::string(ToString(model->gender))});
    }
  }
  for (const auto& [a, b] : slot_model.exclusions) {
    if ((present & SlotBit(a)) && (present & SlotBit(b))) {
      out.push_back({std::string(ToString(a)) + "_EXCLUDES_" + std::string(ToString(b)),
                     SlotSetString(present)});
    }
  }
  for (const auto& item : pair.items) {
    if (!DirectiveAllowed(item, present)) {
      out.push_back({std::string(kViolationDirective),
                     "'" + item.layer_directive + "' on " + std::string(ToString(item.slot))});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DiversitySampler::DiversitySampler(std::vector<std::string> dimensions)
    : dimensions_(std::move(dimensions)) {}

const std::string* DiversitySampler::PrimaryDimension() const {
  return dimensions_.empty() ? nullptr : &dimensions_.front();
}

std::string DiversitySampler::BucketOf(const TagMap& tags, const std::string& dimension) const {
  auto it = tags.find(dimension);
  return it == tags.end() ? std::string() : it->second;
}

std::size_t DiversitySampler::Coverage(const std::string& dimension,
                                       const std::string& value) const {
  auto it = coverage_.find({dimension, value});
  return it == coverage_.end() ? 0 : it->second;
}

std::size_t DiversitySampler::Deficit(const std::string& value,
                                      std::span<const TagMap* const> candidates) const {
  const std::string* primary = PrimaryDimension();
  if (primary == nullptr || candidates.empty()) return 0;
  std::size_t level = std::numeric_limits<std::size_t>::max();
  for (const TagMap* c : candidates) level = std::min(level, Coverage(*primary, BucketOf(*c, *primary)));
  const std::size_t cov = Coverage(*primary, value);
  return cov <= level ? level + 1 - cov : 0;
}

std::size_t DiversitySampler::Pick(std::span<const TagMap* const> candidates, Rng& rng) const {
  if (candidates.empty()) throw InsufficientPoolError("no candidates to pick from");
  // Score = (primary coverage, sum of secondary coverages); lowest wins.
  std::vector<std::pair<std::size_t, std::size_t>> scores(candidates.size(), {0, 0});
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t d = 0; d < dimensions_.size(); ++d) {
      const auto cov = Coverage(dimensions_[d], BucketOf(*candidates[i], dimensions_[d]));
      if (d == 0) {
        scores[i].first = cov;
      } else {
        scores[i].second += cov;
      }
    }
  }
  const auto best = *std::min_element(scores.begin(), scores.end());
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == best) tied.push_back(i);
  }
  return tied[UniformIndex(rng, tied.size())];
}

void DiversitySampler::Commit(const TagMap& tags) {
  for (const auto& d : dimensions_) ++coverage_[{d, BucketOf(tags, d)}];
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> DimensionsIn(const std::vector<std::string>& dims,
                                      const std::vector<TagDimension>& known) {
  std::vector<std::string> out;
  for (const auto& d : dims) {
    for (const auto& k : known) {
      if (k.name == d) {
        out.push_back(d);
        break;
      }
    }
  }
  return out;
}

class PairComposer {
 public:
  PairComposer(const Catalog& catalog, const PairingConfig& config,
               std::vector<SelectionTrace>* trace)
      : catalog_(catalog),
        config_(config),
        trace_(trace),
        rng_(config.seed),
        garment_sampler_(
            DimensionsIn(config.diversity_dimensions, catalog.taxonomy().garment_dimensions)),
        model_sampler_(
            DimensionsIn(config.diversity_dimensions, catalog.taxonomy().model_dimensions)) {
    for (std::size_t i = 0; i < catalog.models().size(); ++i) {
      if (catalog.models()[i].EligibleForPairing()) models_.push_back(i);
    }
    remaining_.assign(catalog.garments().size(), config.garment_use_cap);
    model_uses_.assign(catalog.models().size(), 0);
  }

  std::vector<TryOnPair> Run() {
    const auto planned = PlannedItemCounts(config_);
    std::vector<TryOnPair> pairs;
    pairs.reserve(config_.target_pair_count);
    // Larger outfits first: they need the most distinct slots in stock.
    for (std::size_t k = kMaxItems; k >= kMinItems; --k) {
      for (std::size_t n = 0; n < planned[k - 1]; ++n) pairs.push_back(ComposeOne(k, pairs.size()));
    }
    return pairs;
  }

 private:
  // Slots with at least one usable garment for this gender.
  SlotSet StockedSlots(Gender g) const {
    SlotSet s = 0;
    const auto& garments = catalog_.garments();
    for (std::size_t i = 0; i < garments.size(); ++i) {
      if (remaining_[i] > 0 && garments[i].FitsGender(g)) s |= SlotBit(SlotFor(garments[i].category));
    }
    return s;
  }

  std::vector<SlotSet> UsableSets(std::size_t k, SlotSet stocked) const {
    std::vector<SlotSet> out;
    for (SlotSet s : FeasibleSlotSets(k, config_.slot_model)) {
      if ((s & stocked) == s) out.push_back(s);
    }
    return out;
  }

  TryOnPair ComposeOne(std::size_t k, std::size_t index) {
    std::array<std::vector<SlotSet>, 2> usable;
    for (std::size_t g = 0; g < 2; ++g) usable[g] = UsableSets(k, StockedSlots(static_cast<Gender>(g)));

    std::vector<std::size_t> candidates;
    std::size_t min_use = std::numeric_limits<std::size_t>::max();
    for (std::size_t m : models_) {
      const auto& model = catalog_.models()[m];
      if (config_.model_use_cap != 0 && model_uses_[m] >= config_.model_use_cap) continue;
      if (usable[static_cast<std::size_t>(model.gender)].empty()) continue;
      if (model_uses_[m] < min_use) {
        min_use = model_uses_[m];
        candidates.clear();
      }
      if (model_uses_[m] == min_use) candidates.push_back(m);
    }
    if (candidates.empty()) {
      std::string detail = models_.empty() ? "no verified model images"
                                           : "no verified model with an unused garment set";
      throw InsufficientPoolError("item_count=" + std::to_string(k) + ": " + detail +
                                  "; stocked slots female=" +
                                  SlotSetString(StockedSlots(Gender::kFemale)) +
                                  " male=" + SlotSetString(StockedSlots(Gender::kMale)));
    }
    std::vector<const TagMap*> model_tags;
    for (auto m : candidates) model_tags.push_back(&catalog_.models()[m].tags);
    const std::size_t model_index = candidates[model_sampler_.Pick(model_tags, rng_)];
    const ModelImage& model = catalog_.models()[model_index];
    model_sampler_.Commit(model.tags);
    ++model_uses_[model_index];

    // Least-used slot combination, ties broken by the engine.
    const auto& sets = usable[static_cast<std::size_t>(model.gender)];
    std::vector<SlotSet> best_sets;
    std::size_t best_usage = std::numeric_limits<std::size_t>::max();
    for (SlotSet s : sets) {
      std::size_t usage = 0;
      for (std::size_t i = 0; i < EnumCount<Slot>(); ++i) {
        if (s & SlotBit(static_cast<Slot>(i))) usage += slot_usage_[i];
      }
      if (usage < best_usage) {
        best_usage = usage;
        best_sets.clear();
      }
      if (usage == best_usage) best_sets.push_back(s);
    }
    const SlotSet chosen = best_sets[UniformIndex(rng_, best_sets.size())];

    TryOnPair pair;
    char id[32];
    std::snprintf(id, sizeof id, "pair-%06zu", index + 1);
    pair.pair_id = id;
    pair.model_image_id = model.id;
    for (std::size_t si = 0; si < EnumCount<Slot>(); ++si) {
      const Slot slot = static_cast<Slot>(si);
      if (!(chosen & SlotBit(slot))) continue;
      ++slot_usage_[si];
      pair.items.push_back({PickGarment(slot, model.gender), slot, ""});
    }
    if (config_.assign_directives) AssignDirectives(pair, chosen);
    return pair;
  }

  std::string PickGarment(Slot slot, Gender gender) {
    const auto& garments = catalog_.garments();
    std::vector<std::size_t> pool;
    std::vector<const TagMap*> tags;
    for (std::size_t i = 0; i < garments.size(); ++i) {
      if (remaining_[i] > 0 && SlotFor(garments[i].category) == slot &&
          garments[i].FitsGender(gender)) {
        pool.push_back(i);
        tags.push_back(&garments[i].tags);
      }
    }
    const std::size_t pick = garment_sampler_.Pick(tags, rng_);
    if (trace_ != nullptr) {
      SelectionTrace t;
      t.slot = slot;
      t.chosen = pick;
      const std::string* primary = garment_sampler_.PrimaryDimension();
      for (const TagMap* tm : tags) {
        std::string bucket;
        if (primary != nullptr) {
          auto it = tm->find(*primary);
          if (it != tm->end()) bucket = it->second;
        }
        t.candidate_coverage.push_back(primary ? garment_sampler_.Coverage(*primary, bucket) : 0);
        t.candidate_buckets.push_back(std::move(bucket));
      }
      trace_->push_back(std::move(t));
    }
    const std::size_t gi = pool[pick];
    garment_sampler_.Commit(garments[gi].tags);
    --remaining_[gi];
    return garments[gi].id;
  }

  void AssignDirectives(TryOnPair& pair, SlotSet present) {
    for (auto& item : pair.items) {
      if (item.slot == Slot::kOuter && (present & (SlotBit(Slot::kTop) | SlotBit(Slot::kDress)))) {
        static constexpr std::string_view kOuter[] = {"", kDirectiveOpen, kDirectiveClosed};
        item.layer_directive = std::string(kOuter[UniformIndex(rng_, 3)]);
      } else if (item.slot == Slot::kTop && (present & SlotBit(Slot::kBottom))) {
        static constexpr std::string_view kTuck[] = {"", kDirectiveTucked, kDirectiveUntucked};
        item.layer_directive = std::string(kTuck[UniformIndex(rng_, 3)]);
      }
    }
  }

  const Catalog& catalog_;
  const PairingConfig& config_;
  std::vector<SelectionTrace>* trace_;
  Rng rng_;
  DiversitySampler garment_sampler_;
  DiversitySampler model_sampler_;
  std::vector<std::size_t> models_;
  std::vector<std::size_t> remaining_;
  std::vector<std::size_t> model_uses_;
  std::array<std::size_t, 7> slot_usage_{};
};

}  // namespace

std::vector<TryOnPair> ComposePairs(const Catalog& catalog, const PairingConfig& config,
                                    std::vector<SelectionTrace>* trace) {
  if (auto v = config.Validate(); !v.empty()) throw ConfigError("invalid pairing config: " + v.front());
  return PairComposer(catalog, config, trace).Run();
}

// ---------------------------------------------------------------------------

double NormalizedEntropy(std::span<const std::size_t> counts, std::size_t vocabulary_size) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0 || vocabulary_size <= 1) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return std::clamp(h / std::log(static_cast<double>(vocabulary_size)), 0.0, 1.0);
}

std::vector<DimensionCoverage> DiversityReport(std::span<const TryOnPair> pairs,
                                               const Catalog& catalog,
                                               const std::vector<std::string>& dimensions) {
  const auto& tax = catalog.taxonomy();
  std::vector<DimensionCoverage> out;
  for (const auto& dim : dimensions) {
    DimensionCoverage cov;
    cov.dimension = dim;
    const TagDimension* gdim = tax.FindGarmentDimension(dim);
    const TagDimension* mdim = gdim ? nullptr : tax.FindModelDimension(dim);
    const TagDimension* def = gdim ? gdim : mdim;
    if (def == nullptr) throw ConfigError("unknown diversity dimension '" + dim + "'");
    for (const auto& p : pairs) {
      if (gdim != nullptr) {
        for (const auto& item : p.items) {
          const auto* g = catalog.FindGarment(item.garment_id);
          if (g == nullptr) throw UnknownIdError(item.garment_id);
          ++cov.counts[g->tags.at(dim)];
        }
      } else {
        const auto* m = catalog.FindModel(p.model_image_id);
        if (m == nullptr) throw UnknownIdError(p.model_image_id);
        ++cov.counts[m->tags.at(dim)];
      }
    }
    std::vector<std::size_t> counts;
    for (const auto& [v, c] : cov.counts) counts.push_back(c);
    const std::size_t vocab = def->open ? cov.counts.size() : def->values.size();
    cov.normalized_entropy = NormalizedEntropy(counts, vocab);
    out.push_back(std::move(cov));
  }
  return out;
}

}  // namespace benchkit
