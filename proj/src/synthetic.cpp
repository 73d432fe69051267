// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/synthetic.hpp"

#include <cstdio>

#include "benchkit/error.hpp"
#include "benchkit/judge.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

/// Draw from a dimension's value list.
const std::string& Pick(const TagDimension& d, Rng& rng) {
  return d.values[UniformIndex(rng, d.values.size())];
}

bool Draw(Rng& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

std::string Id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", prefix, i);
  return buf;
}

}  // namespace

Catalog MakeSyntheticCatalog(const SyntheticCatalogOptions& o) {
  if (o.subcategories_per_category == 0) throw ConfigError("need at least one subcategory");
  const TagTaxonomy taxonomy = DefaultTaxonomy();
  Rng rng(o.seed);

  std::vector<ModelImage> models;
  for (std::size_t i = 0; i < o.models; ++i) {
    ModelImage m;
    m.id = Id("model", i);
    m.image_uri = "synthetic://model/" + m.id + ".png";
    m.gender = Draw(rng, o.female_share) ? Gender::kFemale : Gender::kMale;
    m.age_group = static_cast<AgeGroup>(UniformIndex(rng, EnumCount<AgeGroup>()));
    m.pose_complexity = static_cast<PoseComplexity>(UniformIndex(rng, EnumCount<PoseComplexity>()));
    m.background_complexity =
        static_cast<BackgroundComplexity>(UniformIndex(rng, EnumCount<BackgroundComplexity>()));
    m.anonymization = AnonymizationStatus::kVerified;
    for (const auto& d : taxonomy.model_dimensions) m.tags[d.name] = Pick(d, rng);
    m.tags["gender"] = ToString(m.gender);
    m.tags["age_group"] = ToString(m.age_group);
    m.tags["pose_complexity"] = ToString(m.pose_complexity);
    m.tags["background_complexity"] = ToString(m.background_complexity);
    m.tags["subject_count"] = "single";
    models.push_back(std::move(m));
  }

  std::vector<GarmentItem> garments;
  std::size_t n = 0;
  for (std::size_t c = 0; c < EnumCount<Category>(); ++c) {
    const auto category = static_cast<Category>(c);
    for (std::size_t i = 0; i < o.garments_per_category; ++i) {
      GarmentItem g;
      g.id = Id("garment", n++);
      g.image_uri = "synthetic://garment/" + g.id + ".png";
      g.category = category;
      g.subcategory = std::string(ToString(category)) + "_style_" +
                      std::to_string(i % o.subcategories_per_category);
      if (Draw(rng, o.unisex_share)) g.gender_compat = GenderCompat::kUnisex;
      else g.gender_compat = Draw(rng, o.female_share) ? GenderCompat::kFemale : GenderCompat::kMale;
      for (const auto& d : taxonomy.garment_dimensions) {
        g.tags[d.name] = d.open ? g.subcategory : Pick(d, rng);
      }
      g.tags["category"] = ToString(category);
      g.tags["gender_compat"] = ToString(g.gender_compat);
      garments.push_back(std::move(g));
    }
  }
  return Catalog(taxonomy, std::move(models), std::move(garments));
}

std::uint64_t SyntheticJudge::Hash(const std::string& key) const {
  const std::string h = Sha256Hex(std::to_string(seed_) + '\n' + key);
  return std::stoull(h.substr(0, 15), nullptr, 16);
}

int SyntheticJudge::Score(const std::string& key) const {
  const auto span = static_cast<std::uint64_t>(kLikertMax - min_score_ + 1);
  return min_score_ + static_cast<int>(Hash(key) % span);
}

std::string SyntheticJudge::Complete(const JudgeRequest& r) {
  std::string result;
  for (const auto& im : r.images) {
    if (im.role == "result") result = im.uri;
  }
  const std::string base = result + '\n' + r.stage + '\n';
  if (r.stage == "stage1") {
    Json garments = Json::array();
    for (const auto& im : r.images) {
      if (im.role != "garment") continue;
      // The category label sits in the prompt's item list next to the id.
      std::string category;
      const std::string needle = "garment_id \"" + im.garment_id + "\", category \"";
      if (auto pos = r.prompt.find(needle); pos != std::string::npos) {
        const auto start = pos + needle.size();
        category = r.prompt.substr(start, r.prompt.find('"', start) - start);
      }
      garments.push_back({{"garment_id", im.garment_id},
                          {"category", category},
                          {"score", Score(base + im.garment_id)},
                          {"rationale", "synthetic"}});
    }
    return Json{{"identity", {{"score", Score(base + "identity")}, {"rationale", "synthetic"}}},
                {"garments", garments}}
        .dump();
  }
  if (r.stage == "stage2") {
    const bool flag =
        static_cast<double>(Hash(base + "limb") % 10000) < limb_flag_rate_ * 10000.0;
    return Json{{"background_type", Hash(base + "bg_type") % 2 == 0 ? "plain" : "complex"},
                {"background", {{"score", Score(base + "background")}, {"rationale", "synthetic"}}},
                {"physics",
                 {{"score", Score(base + "physics")},
                  {"rationale", flag ? "possible extra finger" : "synthetic"},
                  {"limb_anomaly_flag", flag}}}}
        .dump();
  }
  if (r.stage == "limb_recheck") {
    return Json{{"limb_anomaly_confirmed", Hash(base + "confirm") % 2 == 0},
                {"score", Score(base + "recheck")},
                {"rationale", "synthetic"}}
        .dump();
  }
  throw AdapterError("synthetic judge has no reply for stage '" + r.stage + "'");
}

}  // namespace benchkit
