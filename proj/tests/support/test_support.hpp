// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Builders shared by the unit and acceptance tests.

#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "benchkit/catalog.hpp"
#include "benchkit/taxonomy.hpp"

namespace benchkit::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("benchkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string File(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// A model with every default-taxonomy dimension filled in.
inline ModelImage MakeModel(const std::string& id, Gender gender = Gender::kFemale,
                            AnonymizationStatus status = AnonymizationStatus::kVerified) {
  ModelImage m;
  m.id = id;
  m.image_uri = "file:///models/" + id + ".png";
  m.gender = gender;
  m.anonymization = status;
  m.tags = {{"gender", std::string(ToString(gender))},
            {"age_group", "youth"},
            {"pose_complexity", "simple"},
            {"body_type", "average"},
            {"skin_tone", "3"},
            {"framing", "full_body"},
            {"background_complexity", "plain"},
            {"lighting", "studio"},
            {"scenario", "studio"},
            {"orientation", "front"},
            {"subject_count", "single"}};
  return m;
}

/// Keeps the mirrored tag fields in step after the struct fields change.
inline void SyncModelTags(ModelImage& m) {
  m.tags["gender"] = ToString(m.gender);
  m.tags["age_group"] = ToString(m.age_group);
  m.tags["pose_complexity"] = ToString(m.pose_complexity);
  m.tags["background_complexity"] = ToString(m.background_complexity);
}

inline GarmentItem MakeGarment(const std::string& id, Category category,
                               GenderCompat compat = GenderCompat::kUnisex,
                               std::string subcategory = "") {
  GarmentItem g;
  g.id = id;
  g.image_uri = "file:///garments/" + id + ".png";
  g.category = category;
  g.subcategory = subcategory.empty() ? std::string(ToString(category)) + "_basic" : subcategory;
  g.gender_compat = compat;
  g.tags = {{"category", std::string(ToString(category))},
            {"subcategory", g.subcategory},
            {"gender_compat", std::string(ToString(compat))},
            {"sleeve_length", "none"},
            {"fit", "regular"},
            {"material", "cotton"},
            {"pattern", "solid"},
            {"color_family", "black"},
            {"season", "all_season"},
            {"formality", "casual"},
            {"closure", "none"},
            {"length", "regular"},
            {"layer_role", "base"}};
  return g;
}

}  // namespace benchkit::testing
