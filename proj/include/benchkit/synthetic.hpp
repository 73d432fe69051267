// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Seeded synthetic inputs for offline runs: a catalog that satisfies the
// default taxonomy and a judge that answers every protocol stage with
// schema-valid, deterministic scores.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "benchkit/adapters.hpp"
#include "benchkit/catalog.hpp"

namespace benchkit {

struct SyntheticCatalogOptions {
  std::size_t models = 40;
  std::size_t garments_per_category = 60;
  std::size_t subcategories_per_category = 6;
  double female_share = 0.749;
  double unisex_share = 0.4;  // remaining garments follow the female share
  std::uint64_t seed = 0;
};

/// Models are all anonymization-verified. Image uris use the synthetic://
/// scheme and name no file.
Catalog MakeSyntheticCatalog(const SyntheticCatalogOptions& options = {});

/// Scores are drawn from [min_score, 10] by hashing the request's result
/// image, stage and garment id with the seed, so identical requests always
/// receive identical replies. A limb anomaly is flagged for roughly
/// `limb_flag_rate` of stage-2 calls.
class SyntheticJudge : public JudgeClient {
 public:
  explicit SyntheticJudge(std::uint64_t seed = 0, int min_score = 6, double limb_flag_rate = 0.05)
      : seed_(seed), min_score_(min_score), limb_flag_rate_(limb_flag_rate) {}
  std::string Complete(const JudgeRequest& request) override;

 private:
  std::uint64_t Hash(const std::string& key) const;
  int Score(const std::string& key) const;

  std::uint64_t seed_;
  int min_score_;
  double limb_flag_rate_;
};

}  // namespace benchkit
