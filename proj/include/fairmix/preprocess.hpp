#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairmix/dataset.hpp"

namespace fairmix {

// ---------------------------------------------------------------------------
// Temporal summarization

enum class Descriptor { mean, median, std, min, max, autocorr };

inline constexpr std::array<Descriptor, 6> kAllDescriptors = {
    Descriptor::mean, Descriptor::median, Descriptor::std,
    Descriptor::min,  Descriptor::max,    Descriptor::autocorr};

std::string_view to_string(Descriptor d);
Descriptor parse_descriptor(std::string_view text);

// Bit i set <=> kAllDescriptors[i] is emitted.
class DescriptorMask {
 public:
  DescriptorMask() { bits_.set(); }
  explicit DescriptorMask(const std::vector<Descriptor>& keep);

  bool contains(Descriptor d) const { return bits_.test(static_cast<std::size_t>(d)); }
  std::size_t count() const { return bits_.count(); }
  bool all() const { return bits_.all(); }
  std::vector<Descriptor> descriptors() const;

  // Comma-separated descriptor names, e.g. "mean,std,autocorr".
  static DescriptorMask parse(std::string_view list);
  std::string to_string() const;

 private:
  std::bitset<6> bits_;
};

struct TemporalClip {
  std::string clip_id;
  Matrix series;  // time x feature
  double frame_rate = 1.0;
};

// Per feature, the selected descriptors in the order mean, median, std, min,
// max, autocorr; features are concatenated one after another. The standard
// deviation is the population one. Autocorrelation is the Pearson correlation
// between the series and itself shifted by round(frame_rate) frames (at least
// one), and 0 when the series is shorter than lag + 2 or either slice is
// constant.
Vector summarize_temporal(const TemporalClip& clip, const DescriptorMask& mask = {});

double lagged_autocorrelation(std::span<const double> series, std::size_t lag);

// Summarizes a batch of clips into a table with columns "<feature>_<descriptor>"
// inheriting the level of their source feature.
ModalityTable summarize_clips(std::string modality_name, const std::vector<TemporalClip>& clips,
                              const std::vector<ColumnMeta>& features,
                              const DescriptorMask& mask = {});

// Keeps only summary columns whose "_<descriptor>" suffix is in the mask.
// Columns without a descriptor suffix are kept as they are.
ModalityTable apply_descriptor_mask(const ModalityTable& table, const DescriptorMask& mask);

// ---------------------------------------------------------------------------
// Column cleaning

// Fitted on training rows: which columns survive and the imputation value of
// each surviving column.
class ColumnFilter {
 public:
  static ColumnFilter fit(const ModalityTable& train);

  ModalityTable apply(const ModalityTable& table) const;

  const std::vector<Index>& kept() const { return kept_; }
  const std::vector<std::string>& removed() const { return removed_; }

 private:
  std::vector<Index> kept_;
  std::vector<double> fill_;
  std::vector<std::string> removed_;
  std::size_t n_columns_ = 0;
};

struct CleanedTable {
  ModalityTable table;
  std::vector<std::string> removed;
};

// Drops all-missing and constant columns, then imputes remaining missing cells
// with the column mean of the observed values.
CleanedTable drop_constant_and_null(const ModalityTable& table);

enum class LevelFilter { all, high, low };

std::string_view to_string(LevelFilter f);
LevelFilter parse_level_filter(std::string_view text);

ModalityTable select_level(const ModalityTable& table, FeatureLevel level);
ModalityTable select_level(const ModalityTable& table, LevelFilter filter);

// ---------------------------------------------------------------------------
// Standardization and PCA

class Standardizer {
 public:
  static Standardizer fit(const Matrix& train);

  Matrix apply(const Matrix& x) const;

  const Vector& mean() const { return mean_; }
  const Vector& scale() const { return scale_; }

 private:
  Vector mean_;
  Vector scale_;
};

inline constexpr double kDefaultPcaRatio = 0.80;

class PcaModel {
 public:
  // Eigendecomposition of the training covariance. Keeps the smallest k whose
  // cumulative explained-variance ratio reaches `target_ratio`.
  static PcaModel fit(const Matrix& train, double target_ratio = kDefaultPcaRatio);

  Matrix apply(const Matrix& x) const;

  const Vector& mean() const { return mean_; }
  const Matrix& components() const { return components_; }  // k x d, orthonormal rows
  const Vector& explained_ratio() const { return explained_ratio_; }
  const Vector& all_eigenvalues() const { return eigenvalues_; }  // descending
  Index n_components() const { return components_.rows(); }
  double cumulative_ratio() const { return explained_ratio_.sum(); }

 private:
  Vector mean_;
  Matrix components_;
  Vector explained_ratio_;
  Vector eigenvalues_;
};

// Per-modality feature transform fitted on a training split: column cleaning,
// standardization, then PCA unless the table has at most two columns.
class FeatureTransform {
 public:
  struct Options {
    bool pca = true;
    double pca_target_ratio = kDefaultPcaRatio;
  };

  static FeatureTransform fit(const ModalityTable& train, const Options& options);

  ModalityTable apply(const ModalityTable& table) const;

  const ColumnFilter& filter() const { return filter_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const std::optional<PcaModel>& pca() const { return pca_; }

 private:
  ColumnFilter filter_;
  Standardizer standardizer_;
  std::optional<PcaModel> pca_;
  std::vector<ColumnMeta> output_columns_;
};

}  // namespace fairmix
