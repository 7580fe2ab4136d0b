#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairmix/config.hpp"
#include "fairmix/dataset.hpp"
#include "fairmix/metrics.hpp"

namespace fairmix {

// A metric that may be undefined; `reason` and `label` explain why.
struct MetricValue {
  std::optional<double> value;
  std::string reason;  // machine-readable, e.g. "0/0" or "empty_group"
  std::string label;   // markdown text for the undefined case
};

struct AttributeReport {
  std::string name;
  MetricValue ea;
  MetricValue di;
  std::array<std::size_t, 2> group_sizes{0, 0};  // pooled test rows with A=0, A=1
};

struct FoldReport {
  int index = 0;
  std::size_t n_train = 0;  // before augmentation
  std::size_t n_test = 0;
  std::size_t n_synthetic = 0;
  std::string fingerprint;
  bool skipped = false;
  std::string skip_reason;
  std::optional<double> accuracy;
};

struct EvaluationReport {
  MetricValue accuracy;
  MetricValue f1;
  MetricValue uar;
  std::vector<int> absent_truth_classes;
  std::vector<AttributeReport> attributes;
  std::vector<FoldReport> folds;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  AugmentMethod augment = AugmentMethod::none;
  std::vector<std::string> warnings;
  PredictionSet predictions;  // pooled, in dataset row order
};

// Source data for a configuration: the manifest, or a generated dataset.
Dataset load_config_dataset(const PipelineConfig& config);

// Column selection shared by every fold: modality subset, descriptor mask and
// level filter.
Dataset select_features(const PipelineConfig& config, const Dataset& dataset);

// Cross-validated run of the whole pipeline. Every fit sees training rows
// only; augmentation touches training splits only; metrics are computed on
// the pooled out-of-fold predictions. Throws ExperimentError when every fold
// is skipped.
EvaluationReport run_experiment(const PipelineConfig& config, const Dataset& dataset);

// Metrics of an arbitrary prediction set, with undefined values recorded.
void fill_metrics(EvaluationReport& report);

}  // namespace fairmix
