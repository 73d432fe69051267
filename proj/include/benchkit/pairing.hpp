// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "benchkit/catalog.hpp"
#include "benchkit/util.hpp"

namespace benchkit {

enum class Slot { kTop, kBottom, kDress, kOuter, kShoes, kHat, kBag };
template <>
struct EnumLabels<Slot> {
  static constexpr auto kLabels =
      std::to_array<std::string_view>({"TOP", "BOTTOM", "DRESS", "OUTER", "SHOES", "HAT", "BAG"});
};

inline constexpr std::size_t kMinItems = 1;
inline constexpr std::size_t kMaxItems = 6;

Slot SlotFor(Category category);

/// Bit set over Slot values.
using SlotSet = std::uint8_t;
constexpr SlotSet SlotBit(Slot s) { return static_cast<SlotSet>(1u << static_cast<unsigned>(s)); }
std::string SlotSetString(SlotSet set);

/// Coexistence rules: pairs of slots that may not appear in one outfit.
/// Default: DRESS excludes TOP and BOTTOM. OUTER layers over TOP or DRESS and
/// accessories are unconstrained.
struct SlotModel {
  std::vector<std::pair<Slot, Slot>> exclusions = {{Slot::kDress, Slot::kTop},
                                                   {Slot::kDress, Slot::kBottom}};
  bool Allows(SlotSet set) const;
};

/// Every exclusion-compatible slot set with exactly `size` slots, ascending.
std::vector<SlotSet> FeasibleSlotSets(std::size_t size, const SlotModel& model = {});

/// Styling directives, attachable to OUTER (open/closed) and TOP (tuck).
inline constexpr std::string_view kDirectiveOpen = "worn open, inner layer visible";
inline constexpr std::string_view kDirectiveClosed = "fully closed";
inline constexpr std::string_view kDirectiveTucked = "tucked";
inline constexpr std::string_view kDirectiveUntucked = "untucked";

struct PairItem {
  std::string garment_id;
  Slot slot = Slot::kTop;
  std::string layer_directive;  // empty means none
  friend bool operator==(const PairItem&, const PairItem&) = default;
};

struct TryOnPair {
  std::string pair_id;
  std::string model_image_id;
  std::vector<PairItem> items;  // slot order

  std::size_t item_count() const { return items.size(); }
  /// Person image plus one reference per item.
  std::size_t ref_image_count() const { return items.size() + 1; }
  friend bool operator==(const TryOnPair&, const TryOnPair&) = default;
};

Json ToJson(const TryOnPair& pair);
TryOnPair PairFromJson(const Json& j);
std::vector<TryOnPair> LoadPairs(const std::string& path);
std::string SerializePairs(std::span<const TryOnPair> pairs);

struct PairingConfig {
  std::size_t target_pair_count = 0;
  std::array<double, kMaxItems> item_count_weights{1, 1, 1, 1, 1, 1};  // for 1..6 items
  std::vector<std::string> diversity_dimensions = {"subcategory", "color_family", "pattern"};
  std::uint64_t seed = 0;
  std::size_t garment_use_cap = 1;  // "unique image utilization"
  std::size_t model_use_cap = 0;    // 0 = unlimited
  bool assign_directives = true;
  SlotModel slot_model;

  std::vector<std::string> Validate() const;
};

PairingConfig PairingConfigFromJson(const Json& j);
Json ToJson(const PairingConfig& config);

/// Per-bucket pair counts (index 0 = 1 item) realised from the weights.
std::array<std::size_t, kMaxItems> PlannedItemCounts(const PairingConfig& config);

struct PairViolation {
  std::string code;
  std::string detail;
};

inline constexpr std::string_view kViolationCount = "COUNT_OUT_OF_BOUNDS";
inline constexpr std::string_view kViolationSlotConflict = "SLOT_CONFLICT";
inline constexpr std::string_view kViolationSlotMismatch = "SLOT_MISMATCH";
inline constexpr std::string_view kViolationGender = "GENDER_MISMATCH";
inline constexpr std::string_view kViolationModelNotVerified = "MODEL_NOT_VERIFIED";
inline constexpr std::string_view kViolationDirective = "INVALID_DIRECTIVE";
inline constexpr std::string_view kViolationDuplicateGarment = "DUPLICATE_GARMENT";
/// Exclusion violations are reported as "<A>_EXCLUDES_<B>", e.g.
/// DRESS_EXCLUDES_BOTTOM.

/// All rule violations in one pair. Throws UnknownIdError for ids absent from
/// the catalog.
std::vector<PairViolation> ValidatePair(const TryOnPair& pair, const Catalog& catalog,
                                        const SlotModel& slot_model = {});

/// Greedy round-robin balancing over tag buckets. Coverage counts how many
/// committed entries carry each (dimension, value). Among candidates, only
/// those whose primary bucket sits at the current minimum coverage (the only
/// buckets with a nonzero deficit) are eligible; secondary dimensions break
/// ties, then the seeded engine.
class DiversitySampler {
 public:
  explicit DiversitySampler(std::vector<std::string> dimensions);

  std::size_t Pick(std::span<const TagMap* const> candidates, Rng& rng) const;
  void Commit(const TagMap& tags);

  std::size_t Coverage(const std::string& dimension, const std::string& value) const;
  /// Remaining deficit of `value` in the primary dimension, given the buckets
  /// that still have stock among `candidates`.
  std::size_t Deficit(const std::string& value, std::span<const TagMap* const> candidates) const;
  const std::string* PrimaryDimension() const;

 private:
  std::string BucketOf(const TagMap& tags, const std::string& dimension) const;
  std::vector<std::string> dimensions_;
  std::map<std::pair<std::string, std::string>, std::size_t> coverage_;
};

/// One garment choice made during composition, for auditing the sampler.
struct SelectionTrace {
  Slot slot = Slot::kTop;
  std::vector<std::string> candidate_buckets;   // primary bucket per candidate
  std::vector<std::size_t> candidate_coverage;  // coverage at decision time
  std::size_t chosen = 0;
};

/// Builds `target_pair_count` outfits from verified models and the garment
/// pool. Deterministic for a given (catalog, config). Throws
/// InsufficientPoolError naming the unsatisfiable item-count bucket.
std::vector<TryOnPair> ComposePairs(const Catalog& catalog, const PairingConfig& config,
                                    std::vector<SelectionTrace>* trace = nullptr);

struct DimensionCoverage {
  std::string dimension;
  std::map<std::string, std::size_t> counts;
  double normalized_entropy = 0.0;  // in [0, 1]
};

/// Shannon entropy of the counts divided by ln(K); K is the dimension's
/// vocabulary size (closed) or number of observed values (open).
double NormalizedEntropy(std::span<const std::size_t> counts, std::size_t vocabulary_size);

std::vector<DimensionCoverage> DiversityReport(std::span<const TryOnPair> pairs,
                                               const Catalog& catalog,
                                               const std::vector<std::string>& dimensions);

}  // namespace benchkit
