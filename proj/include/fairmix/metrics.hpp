#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairmix {

struct PredictionRecord {
  std::string sample_id;
  std::string subject_id;
  int true_label = 0;
  int predicted_label = 0;
  std::array<double, 2> proba{0.5, 0.5};
  std::vector<int> attributes;
  int fold = -1;
};

struct PredictionSet {
  std::vector<std::string> attribute_names;
  std::vector<PredictionRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::size_t attribute_index(std::string_view name) const;

  // Labels in {0,1}, probability pairs summing to one, attributes present.
  void validate() const;
};

double accuracy(const PredictionSet& preds);
// Positive-class F1; 0 when precision + recall is 0. Requires at least one true
// or predicted positive.
double f1_score(const PredictionSet& preds);
// Mean of the two per-class recalls; a class absent from the truths
// contributes recall 0.
double uar(const PredictionSet& preds);
// Classes (0 or 1) with no true sample.
std::vector<int> absent_truth_classes(const PredictionSet& preds);

// |error(A=1) - error(A=0)| where error is the group's misclassification rate.
// Throws UndefinedMetricError naming the empty group.
double equal_accuracy(const PredictionSet& preds, std::string_view attribute);

struct DisparateImpact {
  enum class Status { defined, zero_over_zero, division_by_zero };

  Status status = Status::defined;
  double value = 0.0;  // meaningful only when defined

  bool defined() const { return status == Status::defined; }
  std::optional<double> as_optional() const {
    return defined() ? std::optional<double>(value) : std::nullopt;
  }
  // "undef(0/0)" / "undef(÷0)" for the undefined cases.
  std::string label() const;
  std::string reason() const;
};

// Pr(pred=1 | A=0) / Pr(pred=1 | A=1). Throws UndefinedMetricError when a
// group is empty.
DisparateImpact disparate_impact(const PredictionSet& preds, std::string_view attribute);

}  // namespace fairmix
