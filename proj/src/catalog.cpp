// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/catalog.hpp"

#include <set>
#include <utility>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {
namespace {

std::string RequireString(const Json& j, const char* key, const std::string& id) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ValidationError(id, std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

template <typename E>
E RequireEnum(const Json& j, const char* key, const std::string& id) {
  const std::string label = RequireString(j, key, id);
  auto parsed = ParseEnum<E>(label);
  if (!parsed) {
    throw ValidationError(id, std::string("invalid ") + key + " '" + label + "'");
  }
  return *parsed;
}

TagMap ReadTags(const Json& j, const std::string& id) {
  auto it = j.find("tags");
  if (it == j.end() || !it->is_object()) throw ValidationError(id, "missing tags object");
  TagMap tags;
  for (const auto& [k, v] : it->items()) {
    if (!v.is_string()) throw ValidationError(id, "tag '" + k + "' is not a string");
    tags.emplace(k, v.get<std::string>());
  }
  return tags;
}

void ValidateTags(const TagMap& tags, const std::vector<TagDimension>& dims,
                  const std::string& id) {
  for (const auto& d : dims) {
    auto it = tags.find(d.name);
    if (it == tags.end()) throw ValidationError(id, "missing tag dimension '" + d.name + "'");
    if (!d.Accepts(it->second)) {
      throw ValidationError(id, "illegal value '" + it->second + "' for dimension '" + d.name + "'");
    }
  }
  if (tags.size() != dims.size()) {
    for (const auto& [k, v] : tags) {
      bool known = false;
      for (const auto& d : dims) known = known || d.name == k;
      if (!known) throw ValidationError(id, "unknown tag dimension '" + k + "'");
    }
  }
}

// Typed fields that also appear as tag dimensions must agree with the tag.
void CheckMirror(const TagMap& tags, std::string_view dim, std::string_view field_value,
                 const std::string& id) {
  auto it = tags.find(dim);
  if (it != tags.end() && it->second != field_value) {
    throw ValidationError(id, "tag '" + std::string(dim) + "'='" + it->second +
                                  "' disagrees with field value '" + std::string(field_value) +
                                  "'");
  }
}

void ValidateModel(const ModelImage& m, const TagTaxonomy& taxonomy) {
  if (m.id.empty()) throw ValidationError(m.id, "empty id");
  if (m.image_uri.empty()) throw ValidationError(m.id, "empty image_uri");
  ValidateTags(m.tags, taxonomy.model_dimensions, m.id);
  CheckMirror(m.tags, "gender", ToString(m.gender), m.id);
  CheckMirror(m.tags, "age_group", ToString(m.age_group), m.id);
  CheckMirror(m.tags, "pose_complexity", ToString(m.pose_complexity), m.id);
  CheckMirror(m.tags, "background_complexity", ToString(m.background_complexity), m.id);
}

void ValidateGarment(const GarmentItem& g, const TagTaxonomy& taxonomy) {
  if (g.id.empty()) throw ValidationError(g.id, "empty id");
  if (g.image_uri.empty()) throw ValidationError(g.id, "empty image_uri");
  if (g.subcategory.empty()) throw ValidationError(g.id, "empty subcategory");
  ValidateTags(g.tags, taxonomy.garment_dimensions, g.id);
  CheckMirror(g.tags, "category", ToString(g.category), g.id);
  CheckMirror(g.tags, "subcategory", g.subcategory, g.id);
  CheckMirror(g.tags, "gender_compat", ToString(g.gender_compat), g.id);
}

}  // namespace

Json ToJson(const ModelImage& m) {
  return Json{{"schema_version", kSchemaVersion},
              {"kind", "model"},
              {"id", m.id},
              {"image_uri", m.image_uri},
              {"gender", ToString(m.gender)},
              {"age_group", ToString(m.age_group)},
              {"pose_complexity", ToString(m.pose_complexity)},
              {"background_complexity", ToString(m.background_complexity)},
              {"tags", m.tags},
              {"anonymization", ToString(m.anonymization)},
              {"source", ToString(m.source)}};
}

Json ToJson(const GarmentItem& g) {
  return Json{{"schema_version", kSchemaVersion},
              {"kind", "garment"},
              {"id", g.id},
              {"image_uri", g.image_uri},
              {"category", ToString(g.category)},
              {"subcategory", g.subcategory},
              {"gender_compat", ToString(g.gender_compat)},
              {"tags", g.tags},
              {"source", ToString(g.source)}};
}

ModelImage ModelFromJson(const Json& j, const TagTaxonomy& taxonomy) {
  const std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
  ModelImage m;
  m.id = RequireString(j, "id", id);
  m.image_uri = RequireString(j, "image_uri", id);
  m.gender = RequireEnum<Gender>(j, "gender", id);
  m.age_group = RequireEnum<AgeGroup>(j, "age_group", id);
  m.pose_complexity = RequireEnum<PoseComplexity>(j, "pose_complexity", id);
  m.background_complexity = RequireEnum<BackgroundComplexity>(j, "background_complexity", id);
  m.tags = ReadTags(j, id);
  m.anonymization = RequireEnum<AnonymizationStatus>(j, "anonymization", id);
  m.source = RequireEnum<ImageSource>(j, "source", id);
  ValidateModel(m, taxonomy);
  return m;
}

GarmentItem GarmentFromJson(const Json& j, const TagTaxonomy& taxonomy) {
  const std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
  GarmentItem g;
  g.id = RequireString(j, "id", id);
  g.image_uri = RequireString(j, "image_uri", id);
  g.category = RequireEnum<Category>(j, "category", id);
  g.subcategory = RequireString(j, "subcategory", id);
  g.gender_compat = RequireEnum<GenderCompat>(j, "gender_compat", id);
  g.tags = ReadTags(j, id);
  g.source = RequireEnum<ImageSource>(j, "source", id);
  ValidateGarment(g, taxonomy);
  return g;
}

Catalog::Catalog() : data_(std::make_shared<const Data>()) {}

Catalog::Catalog(TagTaxonomy taxonomy, std::vector<ModelImage> models,
                 std::vector<GarmentItem> garments) {
  auto data = std::make_shared<Data>();
  std::set<std::string, std::less<>> ids;
  for (std::size_t i = 0; i < models.size(); ++i) {
    ValidateModel(models[i], taxonomy);
    if (!ids.insert(models[i].id).second) throw DuplicateIdError(models[i].id);
    data->model_index.emplace(models[i].id, i);
  }
  for (std::size_t i = 0; i < garments.size(); ++i) {
    ValidateGarment(garments[i], taxonomy);
    if (!ids.insert(garments[i].id).second) throw DuplicateIdError(garments[i].id);
    data->garment_index.emplace(garments[i].id, i);
  }
  data->taxonomy = std::move(taxonomy);
  data->models = std::move(models);
  data->garments = std::move(garments);
  data_ = std::move(data);
}

const ModelImage* Catalog::FindModel(std::string_view id) const {
  auto it = data_->model_index.find(id);
  return it == data_->model_index.end() ? nullptr : &data_->models[it->second];
}

const GarmentItem* Catalog::FindGarment(std::string_view id) const {
  auto it = data_->garment_index.find(id);
  return it == data_->garment_index.end() ? nullptr : &data_->garments[it->second];
}

std::size_t Catalog::SubcategoryCount() const {
  std::set<std::pair<Category, std::string>> distinct;
  for (const auto& g : data_->garments) distinct.emplace(g.category, g.subcategory);
  return distinct.size();
}

std::string Catalog::Serialize() const {
  std::vector<Json> records;
  records.reserve(data_->models.size() + data_->garments.size());
  for (const auto& m : data_->models) records.push_back(ToJson(m));
  for (const auto& g : data_->garments) records.push_back(ToJson(g));
  return DumpJsonLines(records);
}

Catalog LoadCatalog(const std::vector<std::string>& manifest_paths, const TagTaxonomy& taxonomy) {
  std::vector<ModelImage> models;
  std::vector<GarmentItem> garments;
  for (const auto& path : manifest_paths) {
    ForEachJsonLine(path, [&](const Json& j, std::size_t line) {
      auto kind = j.find("kind");
      if (kind == j.end() || !kind->is_string()) {
        throw ParseError(path, line, "record lacks a string 'kind'");
      }
      auto version = j.find("schema_version");
      if (version == j.end() || !version->is_number_integer() ||
          version->get<int>() != kSchemaVersion) {
        throw ParseError(path, line, "unsupported or missing schema_version");
      }
      if (*kind == "model") {
        models.push_back(ModelFromJson(j, taxonomy));
      } else if (*kind == "garment") {
        garments.push_back(GarmentFromJson(j, taxonomy));
      } else {
        throw ParseError(path, line, "unknown record kind '" + kind->get<std::string>() + "'");
      }
    });
  }
  return Catalog(taxonomy, std::move(models), std::move(garments));
}

const Distribution* StatsReport::FindDistribution(std::string_view dimension) const {
  for (const auto& d : model_distributions) {
    if (d.dimension == dimension) return &d;
  }
  return nullptr;
}

double StatsReport::Percent(std::string_view dimension, std::string_view label) const {
  if (const auto* d = FindDistribution(dimension)) {
    for (const auto& r : d->rows) {
      if (r.label == label) return r.percent;
    }
  }
  return 0.0;
}

namespace {

template <typename E, typename Getter>
Distribution Distribute(std::string dimension, const std::vector<ModelImage>& models,
                        Getter get) {
  std::vector<std::size_t> counts(EnumCount<E>(), 0);
  for (const auto& m : models) ++counts[static_cast<std::size_t>(get(m))];
  const auto pct = PercentagesOneDecimal(counts);
  Distribution d{std::move(dimension), models.size(), {}};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d.rows.push_back({std::string(EnumLabels<E>::kLabels[i]), counts[i], pct[i]});
  }
  return d;
}

}  // namespace

StatsReport ComputeCatalogStats(const Catalog& catalog) {
  StatsReport s;
  s.model_count = catalog.models().size();
  s.garment_count = catalog.garments().size();
  std::vector<std::set<std::string>> subcats(EnumCount<Category>());
  s.categories.resize(EnumCount<Category>());
  for (std::size_t i = 0; i < s.categories.size(); ++i) {
    s.categories[i].category = static_cast<Category>(i);
  }
  for (const auto& g : catalog.garments()) {
    const auto c = static_cast<std::size_t>(g.category);
    ++s.categories[c].items;
    subcats[c].insert(g.subcategory);
  }
  for (std::size_t i = 0; i < s.categories.size(); ++i) {
    s.categories[i].subcategories = subcats[i].size();
    s.subcategory_total += subcats[i].size();
  }
  const auto& models = catalog.models();
  s.model_distributions.push_back(
      Distribute<Gender>("gender", models, [](const ModelImage& m) { return m.gender; }));
  s.model_distributions.push_back(
      Distribute<AgeGroup>("age_group", models, [](const ModelImage& m) { return m.age_group; }));
  s.model_distributions.push_back(Distribute<PoseComplexity>(
      "pose_complexity", models, [](const ModelImage& m) { return m.pose_complexity; }));
  s.model_distributions.push_back(Distribute<BackgroundComplexity>(
      "background_complexity", models,
      [](const ModelImage& m) { return m.background_complexity; }));
  return s;
}

Json ToJson(const StatsReport& stats) {
  Json cats = Json::array();
  for (const auto& c : stats.categories) {
    cats.push_back({{"category", ToString(c.category)},
                    {"items", c.items},
                    {"subcategories", c.subcategories}});
  }
  Json dists = Json::array();
  for (const auto& d : stats.model_distributions) {
    Json rows = Json::array();
    for (const auto& r : d.rows) {
      rows.push_back({{"label", r.label}, {"count", r.count}, {"percent", r.percent}});
    }
    dists.push_back({{"dimension", d.dimension}, {"total", d.total}, {"rows", rows}});
  }
  return Json{{"model_count", stats.model_count},
              {"garment_count", stats.garment_count},
              {"subcategory_total", stats.subcategory_total},
              {"categories", cats},
              {"model_distributions", dists}};
}

}  // namespace benchkit
