// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "benchkit/jsonl.hpp"

namespace benchkit {

/// One attribute axis of the tag system. An `open` dimension accepts any
/// non-empty label (its `values` list only seeds examples); a closed one
/// accepts exactly the listed labels.
struct TagDimension {
  std::string name;
  std::vector<std::string> values;
  bool open = false;

  bool Accepts(std::string_view value) const;
  friend bool operator==(const TagDimension&, const TagDimension&) = default;
};

struct TagTaxonomy {
  std::vector<TagDimension> model_dimensions;
  std::vector<TagDimension> garment_dimensions;

  const TagDimension* FindModelDimension(std::string_view name) const;
  const TagDimension* FindGarmentDimension(std::string_view name) const;
  friend bool operator==(const TagTaxonomy&, const TagTaxonomy&) = default;
};

struct TaxonomyViolation {
  std::string list;       // "model" or "garment"
  std::string dimension;  // offending dimension name
  std::string message;
};

/// Shipped default: 11 model dimensions and 13 garment dimensions. The
/// dimension names are a stand-in; edit data/taxonomy.default.json to change.
TagTaxonomy DefaultTaxonomy();

/// Every invariant violation: duplicate dimension names, duplicate values
/// within a dimension, empty value lists, empty names. Empty result means ok.
std::vector<TaxonomyViolation> ValidateTaxonomy(const TagTaxonomy& taxonomy);

Json ToJson(const TagTaxonomy& taxonomy);
TagTaxonomy TaxonomyFromJson(const Json& j);
TagTaxonomy LoadTaxonomy(const std::string& path);

}  // namespace benchkit
