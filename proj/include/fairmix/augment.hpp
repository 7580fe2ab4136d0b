#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairmix/dataset.hpp"

namespace fairmix {

enum class AugmentMethod { none, random_oversample, mixfeat };

std::string_view to_string(AugmentMethod m);
AugmentMethod parse_augment_method(std::string_view text);

// A balancing unit: one combination of all declared attributes plus a label.
struct CellKey {
  std::vector<int> attributes;
  int label = 0;

  auto operator<=>(const CellKey&) const = default;
  bool operator==(const CellKey&) const = default;
};

std::string to_string(const CellKey& key);

struct CellPlan {
  CellKey key;
  std::size_t current_count = 0;
  std::size_t target_count = 0;

  std::size_t deficit() const { return target_count - current_count; }
};

struct AugmentationPlan {
  AugmentMethod method = AugmentMethod::mixfeat;
  std::vector<CellPlan> cells;      // non-empty cells, in key order
  std::vector<CellKey> unreachable;  // empty cells of the cross-product

  std::size_t total_synthetic() const;
};

// Every non-empty (attributes x label) cell is raised to the largest cell count.
AugmentationPlan plan_balancing(const Dataset& train, AugmentMethod method = AugmentMethod::mixfeat);

struct MixFeatConfig {
  double beta_alpha = 1.0;
  double beta_beta = 1.0;
  std::uint64_t seed = 0;
  // When set, one fixed mixing weight per modality replaces the Beta draws.
  std::optional<std::vector<double>> fixed_lambdas;

  void validate() const;
};

// Provenance of one appended row.
struct SyntheticSample {
  std::size_t row = 0;
  std::size_t parent_i = 0;
  std::size_t parent_j = 0;
  std::vector<double> lambdas;  // per modality; {1, ...} for plain copies
};

struct AugmentedDataset {
  Dataset dataset;
  std::vector<SyntheticSample> synthetic;
};

// Appends uniformly drawn copies (with replacement) of each deficient cell's
// rows. Copies get fresh sample ids and keep their source's subject.
AugmentedDataset random_oversample(const Dataset& train, const AugmentationPlan& plan,
                                   std::uint64_t seed);

// Appends convex combinations of two parents drawn from the same cell, with an
// independent Beta weight per modality and per synthetic row. A single-row
// cell mixes its row with itself.
AugmentedDataset mixfeat(const Dataset& train, const AugmentationPlan& plan,
                         const MixFeatConfig& config);

// lambda * a + (1 - lambda) * b, kept inside [min(a, b), max(a, b)] and exact at
// the endpoints.
double mix_value(double a, double b, double lambda);

// Dispatches on plan.method; `none` returns the input unchanged.
AugmentedDataset augment(const Dataset& train, AugmentMethod method, const MixFeatConfig& config);

}  // namespace fairmix
