#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = Eigen::VectorXi;
using Index = Eigen::Index;

enum class FeatureLevel { high, low };

std::string_view to_string(FeatureLevel level);
FeatureLevel parse_feature_level(std::string_view text);

struct ColumnMeta {
  std::string name;
  FeatureLevel level = FeatureLevel::low;

  bool operator==(const ColumnMeta&) const = default;
};

// One modality's sample x feature matrix. NaN marks a missing cell; any
// other non-finite value is rejected by validate().
struct ModalityTable {
  std::string name;
  Matrix samples;
  std::vector<ColumnMeta> columns;

  Index n_samples() const { return samples.rows(); }
  Index n_features() const { return samples.cols(); }

  void validate() const;

  ModalityTable select_rows(std::span<const std::size_t> rows) const;
  ModalityTable select_columns(std::span<const Index> cols) const;
};

struct SampleMeta {
  std::string sample_id;
  std::string subject_id;
  int label = 0;                // 1 = high-PA
  std::vector<int> attributes;  // aligned with Dataset::attribute_names(); 1 = majority
  bool synthetic = false;       // produced by augmentation, never persisted

  bool operator==(const SampleMeta&) const = default;
};

// Row-aligned multimodal dataset. Construction validates every invariant and
// collects degenerate-group warnings; the object is immutable afterwards.
class Dataset {
 public:
  Dataset(std::vector<ModalityTable> modalities, std::vector<SampleMeta> meta,
          std::vector<std::string> attribute_names);

  std::size_t n_samples() const { return meta_.size(); }
  const std::vector<ModalityTable>& modalities() const { return modalities_; }
  const std::vector<SampleMeta>& meta() const { return meta_; }
  const std::vector<std::string>& attribute_names() const { return attribute_names_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const ModalityTable& modality(std::string_view name) const;
  std::size_t attribute_index(std::string_view name) const;

  Labels labels() const;
  std::vector<int> attribute_values(std::string_view name) const;

  Dataset subset(std::span<const std::size_t> rows) const;
  // Same rows and metadata, different feature tables.
  Dataset with_modalities(std::vector<ModalityTable> modalities) const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<ModalityTable> modalities_;
  std::vector<SampleMeta> meta_;
  std::vector<std::string> attribute_names_;
  std::vector<std::string> warnings_;
};

// Returns 1 (high-PA) iff `pa_score > threshold`.
int binarize_panas(double pa_score, double threshold = 33.3);

inline constexpr double kDefaultPanasThreshold = 33.3;

// Loads a dataset from a `key=value` manifest:
//   modality.<name>=<feature csv>
//   levels.<name>=<levels csv>        (optional; untagged columns are low-level)
//   metadata=<metadata csv>
//   panas_threshold=<real>            (optional, default 33.3)
// Relative paths resolve against the manifest's directory.
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Writes manifest.txt, metadata.csv, <modality>.csv and <modality>_levels.csv
// under `dir` and returns the manifest path. Values use shortest round-trip
// formatting, so reloading reproduces the dataset bit for bit.
std::filesystem::path write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

std::string format_double(double value);

}  // namespace fairmix
