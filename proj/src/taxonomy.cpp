// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/taxonomy.hpp"

#include <algorithm>
#include <set>

#include "benchkit/error.hpp"
#include "benchkit/util.hpp"

namespace benchkit {

bool TagDimension::Accepts(std::string_view value) const {
  if (value.empty()) return false;
  if (open) return true;
  return std::find(values.begin(), values.end(), value) != values.end();
}

namespace {

const TagDimension* FindIn(const std::vector<TagDimension>& dims, std::string_view name) {
  for (const auto& d : dims) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

void CheckList(const std::string& list, const std::vector<TagDimension>& dims,
               std::vector<TaxonomyViolation>& out) {
  std::set<std::string> names;
  std::set<std::string> reported;
  for (const auto& d : dims) {
    if (d.name.empty()) out.push_back({list, d.name, "dimension name is empty"});
    if (!names.insert(d.name).second && reported.insert(d.name).second) {
      out.push_back({list, d.name, "duplicate dimension '" + d.name + "'"});
    }
    if (d.values.empty()) {
      out.push_back({list, d.name, "dimension '" + d.name + "' has no values"});
    }
    std::set<std::string> seen;
    for (const auto& v : d.values) {
      if (v.empty()) out.push_back({list, d.name, "empty value in '" + d.name + "'"});
      if (!seen.insert(v).second) {
        out.push_back({list, d.name, "duplicate value '" + v + "' in '" + d.name + "'"});
      }
    }
  }
}

std::vector<TagDimension> DimsFromJson(const Json& arr) {
  std::vector<TagDimension> out;
  for (const auto& d : arr) {
    TagDimension dim;
    dim.name = d.at("name").get<std::string>();
    dim.values = d.at("values").get<std::vector<std::string>>();
    dim.open = d.value("open", false);
    out.push_back(std::move(dim));
  }
  return out;
}

Json DimsToJson(const std::vector<TagDimension>& dims) {
  Json arr = Json::array();
  for (const auto& d : dims) {
    Json j{{"name", d.name}, {"values", d.values}};
    if (d.open) j["open"] = true;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

const TagDimension* TagTaxonomy::FindModelDimension(std::string_view name) const {
  return FindIn(model_dimensions, name);
}

const TagDimension* TagTaxonomy::FindGarmentDimension(std::string_view name) const {
  return FindIn(garment_dimensions, name);
}

TagTaxonomy DefaultTaxonomy() {
  TagTaxonomy t;
  t.model_dimensions = {
      {"gender", {"female", "male"}},
      {"age_group", {"child", "teenager", "youth", "senior"}},
      {"pose_complexity", {"simple", "medium", "complex"}},
      {"body_type", {"slim", "average", "athletic", "curvy", "plus_size"}},
      {"skin_tone", {"1", "2", "3", "4", "5", "6"}},
      {"framing", {"full_body", "three_quarter", "half_body", "close_up"}},
      {"background_complexity", {"plain", "moderate", "complex"}},
      {"lighting", {"studio", "natural", "low_light", "backlit", "mixed"}},
      {"scenario", {"studio", "street", "indoor", "outdoor_nature", "selfie", "event"}},
      {"orientation", {"front", "side", "back", "three_quarter_turn"}},
      {"subject_count", {"single", "multiple"}},
  };
  t.garment_dimensions = {
      {"category", {"top", "pants", "skirt", "dress", "coat", "shoes", "bag", "hat"}},
      {"subcategory", {"t_shirt", "shirt", "jeans", "a_line_skirt", "slip_dress",
                       "trench_coat", "sneakers", "tote", "bucket_hat"},
       true},
      {"gender_compat", {"female", "male", "unisex"}},
      {"sleeve_length", {"none", "sleeveless", "short", "three_quarter", "long"}},
      {"fit", {"none", "slim", "regular", "loose", "oversized"}},
      {"material", {"cotton", "denim", "knit", "silk", "leather", "wool", "synthetic", "other"}},
      {"pattern", {"solid", "striped", "plaid", "floral", "graphic", "print", "other"}},
      {"color_family", {"black", "white", "grey", "red", "blue", "green", "yellow", "brown",
                        "pink", "purple", "multi"}},
      {"season", {"spring_summer", "autumn_winter", "all_season"}},
      {"formality", {"casual", "smart_casual", "formal", "sport"}},
      {"closure", {"none", "buttons", "zipper", "laces", "wrap", "other"}},
      {"length", {"none", "cropped", "regular", "long", "maxi"}},
      {"layer_role", {"base", "mid", "outer", "accessory"}},
  };
  return t;
}

std::vector<TaxonomyViolation> ValidateTaxonomy(const TagTaxonomy& taxonomy) {
  std::vector<TaxonomyViolation> out;
  CheckList("model", taxonomy.model_dimensions, out);
  CheckList("garment", taxonomy.garment_dimensions, out);
  return out;
}

Json ToJson(const TagTaxonomy& taxonomy) {
  return Json{{"schema_version", kSchemaVersion},
              {"model_dimensions", DimsToJson(taxonomy.model_dimensions)},
              {"garment_dimensions", DimsToJson(taxonomy.garment_dimensions)}};
}

TagTaxonomy TaxonomyFromJson(const Json& j) {
  try {
    TagTaxonomy t;
    t.model_dimensions = DimsFromJson(j.at("model_dimensions"));
    t.garment_dimensions = DimsFromJson(j.at("garment_dimensions"));
    return t;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed taxonomy: ") + e.what());
  }
}

TagTaxonomy LoadTaxonomy(const std::string& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed taxonomy '" + path + "': " + e.what());
  }
  return TaxonomyFromJson(j);
}

}  // namespace benchkit
