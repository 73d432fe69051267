// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "benchkit/jsonl.hpp"
#include "benchkit/taxonomy.hpp"

namespace benchkit {

enum class Gender { kFemale, kMale };
enum class AgeGroup { kChild, kTeenager, kYouth, kSenior };
enum class PoseComplexity { kSimple, kMedium, kComplex };
enum class BackgroundComplexity { kPlain, kModerate, kComplex };
enum class AnonymizationStatus { kPending, kSwapped, kVerified, kRejected };
enum class ImageSource { kInternet, kEcommerce };
enum class Category { kTop, kPants, kSkirt, kDress, kCoat, kShoes, kBag, kHat };
enum class GenderCompat { kFemale, kMale, kUnisex };

/// Label tables, in enum order. Labels are the on-disk spelling.
template <typename E>
struct EnumLabels;

#define BENCHKIT_ENUM_LABELS(E, ...)                                      \
  template <>                                                             \
  struct EnumLabels<E> {                                                  \
    static constexpr auto kLabels = std::to_array<std::string_view>({__VA_ARGS__}); \
  }

BENCHKIT_ENUM_LABELS(Gender, "female", "male");
BENCHKIT_ENUM_LABELS(AgeGroup, "child", "teenager", "youth", "senior");
BENCHKIT_ENUM_LABELS(PoseComplexity, "simple", "medium", "complex");
BENCHKIT_ENUM_LABELS(BackgroundComplexity, "plain", "moderate", "complex");
BENCHKIT_ENUM_LABELS(AnonymizationStatus, "pending", "swapped", "verified", "rejected");
BENCHKIT_ENUM_LABELS(ImageSource, "internet", "ecommerce");
BENCHKIT_ENUM_LABELS(Category, "top", "pants", "skirt", "dress", "coat", "shoes", "bag", "hat");
BENCHKIT_ENUM_LABELS(GenderCompat, "female", "male", "unisex");

#undef BENCHKIT_ENUM_LABELS

template <typename E>
constexpr std::string_view ToString(E value) {
  return EnumLabels<E>::kLabels[static_cast<std::size_t>(value)];
}

template <typename E>
std::optional<E> ParseEnum(std::string_view label) {
  const auto& labels = EnumLabels<E>::kLabels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <typename E>
constexpr std::size_t EnumCount() {
  return EnumLabels<E>::kLabels.size();
}

using TagMap = std::map<std::string, std::string, std::less<>>;

struct ModelImage {
  std::string id;
  std::string image_uri;
  Gender gender = Gender::kFemale;
  AgeGroup age_group = AgeGroup::kYouth;
  PoseComplexity pose_complexity = PoseComplexity::kSimple;
  BackgroundComplexity background_complexity = BackgroundComplexity::kPlain;
  TagMap tags;
  AnonymizationStatus anonymization = AnonymizationStatus::kPending;
  ImageSource source = ImageSource::kInternet;

  bool EligibleForPairing() const { return anonymization == AnonymizationStatus::kVerified; }
  friend bool operator==(const ModelImage&, const ModelImage&) = default;
};

struct GarmentItem {
  std::string id;
  std::string image_uri;
  Category category = Category::kTop;
  std::string subcategory;
  GenderCompat gender_compat = GenderCompat::kUnisex;
  TagMap tags;
  ImageSource source = ImageSource::kEcommerce;

  bool FitsGender(Gender g) const {
    return gender_compat == GenderCompat::kUnisex ||
           static_cast<int>(gender_compat) == static_cast<int>(g);
  }
  friend bool operator==(const GarmentItem&, const GarmentItem&) = default;
};

Json ToJson(const ModelImage& m);
Json ToJson(const GarmentItem& g);

/// Decode and fully validate one manifest record. Throws ValidationError
/// naming the record id.
ModelImage ModelFromJson(const Json& j, const TagTaxonomy& taxonomy);
GarmentItem GarmentFromJson(const Json& j, const TagTaxonomy& taxonomy);

/// Immutable, validated snapshot of the benchmark's model and garment pools.
/// Copies share the underlying storage; nothing mutates it after load.
class Catalog {
 public:
  Catalog();
  /// Validates every entry; throws ValidationError / DuplicateIdError.
  Catalog(TagTaxonomy taxonomy, std::vector<ModelImage> models,
          std::vector<GarmentItem> garments);

  const TagTaxonomy& taxonomy() const { return data_->taxonomy; }
  const std::vector<ModelImage>& models() const { return data_->models; }
  const std::vector<GarmentItem>& garments() const { return data_->garments; }

  const ModelImage* FindModel(std::string_view id) const;
  const GarmentItem* FindGarment(std::string_view id) const;

  /// Distinct (category, subcategory) combinations.
  std::size_t SubcategoryCount() const;

  /// Line-delimited manifest: models first, then garments, input order kept.
  std::string Serialize() const;

 private:
  struct Data {
    TagTaxonomy taxonomy;
    std::vector<ModelImage> models;
    std::vector<GarmentItem> garments;
    std::map<std::string, std::size_t, std::less<>> model_index;
    std::map<std::string, std::size_t, std::less<>> garment_index;
  };
  std::shared_ptr<const Data> data_;
};

/// Reads one or more line-delimited manifests. Each record carries a `kind`
/// of "model" or "garment" and a `schema_version`.
Catalog LoadCatalog(const std::vector<std::string>& manifest_paths, const TagTaxonomy& taxonomy);

struct CountRow {
  std::string label;
  std::size_t count = 0;
  double percent = 0.0;  // one decimal, row group sums to 100.0
};

struct Distribution {
  std::string dimension;
  std::size_t total = 0;
  std::vector<CountRow> rows;
};

struct CategoryStats {
  Category category = Category::kTop;
  std::size_t items = 0;
  std::size_t subcategories = 0;
};

struct StatsReport {
  std::size_t model_count = 0;
  std::size_t garment_count = 0;
  std::size_t subcategory_total = 0;
  std::vector<CategoryStats> categories;     // all 8, enum order
  std::vector<Distribution> model_distributions;  // gender, age, pose, background

  const Distribution* FindDistribution(std::string_view dimension) const;
  double Percent(std::string_view dimension, std::string_view label) const;
};

StatsReport ComputeCatalogStats(const Catalog& catalog);
Json ToJson(const StatsReport& stats);

}  // namespace benchkit
