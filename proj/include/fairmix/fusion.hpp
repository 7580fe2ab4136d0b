#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fairmix/models.hpp"

namespace fairmix {

enum class FusionStrategy { early, vote_hard, vote_soft, stack_hard, stack_soft };

std::string_view to_string(FusionStrategy s);
FusionStrategy parse_fusion_strategy(std::string_view text);

bool is_stacking(FusionStrategy s);

inline PredictorSpec default_meta_spec() {
  PredictorSpec s;
  s.kind = ModelKind::logistic;
  return s;
}

struct FusionSpec {
  FusionStrategy strategy = FusionStrategy::vote_soft;
  PredictorSpec base;
  PredictorSpec meta = default_meta_spec();
  int stacking_folds = 5;

  void validate() const;
};

// Column-wise concatenation in the given order.
Matrix early_fuse(std::span<const Matrix> modalities);

struct FusedOutput {
  Labels labels;
  Matrix proba;  // n x 2
};

// Combines per-modality base models.
//   early:      one base model over the concatenated features
//   vote_hard:  majority of base labels; an even split goes to the vote of
//               the most confident base model, and to class 1 if that ties
//               too. Reported probabilities are the mean base probabilities.
//   vote_soft:  argmax of the mean base probabilities
//   stack_hard: meta-model over the vector of base labels
//   stack_soft: meta-model over the concatenated base probability pairs
// With a single modality every late strategy returns the base model output.
FusedOutput fuse_predict(const FusionSpec& spec, std::span<const PredictorPtr> bases,
                         const PredictorPtr& meta, std::span<const Matrix> x_per_modality);

// Meta-model inputs built from base outputs: label per modality (hard) or
// probability pair per modality (soft).
Matrix meta_features(FusionStrategy strategy, std::span<const PredictorPtr> bases,
                     std::span<const Matrix> x_per_modality);

struct StackingFit {
  PredictorPtr meta;
  std::vector<PredictorPtr> bases;  // refit on the full training split
  Matrix train_meta_features;
  // Internal fold of each training row; the meta-feature of row r came from
  // base models fitted on exactly `fold_train_rows[fold_of_row[r]]`.
  std::vector<int> fold_of_row;
  std::vector<std::vector<Index>> fold_train_rows;
};

// Out-of-fold stacking: 5 internal folds, 2 when the split has fewer than 10
// rows. Fewer than 4 rows or fewer than 2 modalities raises StackingError.
StackingFit fit_stacking_meta(const FusionSpec& spec, std::span<const Matrix> train_per_modality,
                              const Labels& y, std::uint64_t seed);

// Fitted fusion ensemble; immutable after fit.
class FusionModel {
 public:
  static FusionModel fit(const FusionSpec& spec, std::span<const Matrix> train_per_modality,
                         const Labels& y, std::uint64_t seed);

  FusedOutput predict(std::span<const Matrix> x_per_modality) const;

  const FusionSpec& spec() const { return spec_; }
  const std::vector<PredictorPtr>& bases() const { return bases_; }
  const PredictorPtr& meta() const { return meta_; }
  const std::optional<StackingFit>& stacking() const { return stacking_; }

 private:
  FusionSpec spec_;
  std::size_t n_modalities_ = 0;
  std::vector<PredictorPtr> bases_;
  PredictorPtr meta_;
  std::optional<StackingFit> stacking_;
};

}  // namespace fairmix
