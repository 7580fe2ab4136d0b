#include "fairmix/preprocess.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmix/error.hpp"
#include "fairmix/kvfile.hpp"

namespace fairmix {

std::string_view to_string(Descriptor d) {
  switch (d) {
    case Descriptor::mean: return "mean";
    case Descriptor::median: return "median";
    case Descriptor::std: return "std";
    case Descriptor::min: return "min";
    case Descriptor::max: return "max";
    case Descriptor::autocorr: return "autocorr";
  }
  return "?";
}

Descriptor parse_descriptor(std::string_view text) {
  for (auto d : kAllDescriptors) {
    if (to_string(d) == text) return d;
  }
  throw ConfigError("unknown descriptor '" + std::string(text) + "'");
}

DescriptorMask::DescriptorMask(const std::vector<Descriptor>& keep) {
  for (auto d : keep) bits_.set(static_cast<std::size_t>(d));
}

std::vector<Descriptor> DescriptorMask::descriptors() const {
  std::vector<Descriptor> out;
  for (auto d : kAllDescriptors) {
    if (contains(d)) out.push_back(d);
  }
  return out;
}

DescriptorMask DescriptorMask::parse(std::string_view list) {
  const std::string t = trim(list);
  if (t == "all") return {};
  std::vector<Descriptor> keep;
  for (const auto& item : split(t, ',')) keep.push_back(parse_descriptor(trim(item)));
  if (keep.empty()) throw ConfigError("descriptor mask is empty");
  return DescriptorMask(keep);
}

std::string DescriptorMask::to_string() const {
  std::string out;
  for (auto d : descriptors()) {
    if (!out.empty()) out += ',';
    out += fairmix::to_string(d);
  }
  return out;
}

double lagged_autocorrelation(std::span<const double> series, std::size_t lag) {
  const std::size_t n = series.size();
  if (lag == 0 || n < lag + 2) return 0.0;
  const std::size_t m = n - lag;
  const auto head = series.subspan(0, m);
  const auto tail = series.subspan(lag, m);
  const double mh = std::accumulate(head.begin(), head.end(), 0.0) / static_cast<double>(m);
  const double mt = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = head[i] - mh;
    const double dy = tail[i] - mt;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Vector summarize_temporal(const TemporalClip& clip, const DescriptorMask& mask) {
  const Index t = clip.series.rows();
  const Index d = clip.series.cols();
  if (t < 1 || d < 1) throw InputError("clip '" + clip.clip_id + "' has an empty series");
  if (!(clip.frame_rate > 0.0) || !std::isfinite(clip.frame_rate)) {
    throw InputError("clip '" + clip.clip_id + "' frame rate must be positive");
  }
  const auto lag = static_cast<std::size_t>(std::max(1.0, std::round(clip.frame_rate)));
  const auto per_feature = static_cast<Index>(mask.count());
  Vector out(per_feature * d);

  std::vector<double> col(static_cast<std::size_t>(t));
  for (Index f = 0; f < d; ++f) {
    for (Index r = 0; r < t; ++r) col[static_cast<std::size_t>(r)] = clip.series(r, f);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(t);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    Index k = f * per_feature;
    for (auto desc : mask.descriptors()) {
      double value = 0.0;
      switch (desc) {
        case Descriptor::mean: value = mean; break;
        case Descriptor::median: value = median_of(col); break;
        case Descriptor::std: value = std::sqrt(ss / static_cast<double>(t)); break;
        case Descriptor::min: value = *std::min_element(col.begin(), col.end()); break;
        case Descriptor::max: value = *std::max_element(col.begin(), col.end()); break;
        case Descriptor::autocorr: value = lagged_autocorrelation(col, lag); break;
      }
      out(k++) = value;
    }
  }
  return out;
}

ModalityTable summarize_clips(std::string modality_name, const std::vector<TemporalClip>& clips,
                              const std::vector<ColumnMeta>& features,
                              const DescriptorMask& mask) {
  if (clips.empty()) throw InputError("no clips to summarize");
  ModalityTable table;
  table.name = std::move(modality_name);
  for (const auto& f : features) {
    for (auto d : mask.descriptors()) {
      table.columns.push_back({f.name + "_" + std::string(to_string(d)), f.level});
    }
  }
  table.samples.resize(static_cast<Index>(clips.size()), static_cast<Index>(table.columns.size()));
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (static_cast<std::size_t>(clips[i].series.cols()) != features.size()) {
      throw ShapeError("clip '" + clips[i].clip_id + "' has " +
                       std::to_string(clips[i].series.cols()) + " features, expected " +
                       std::to_string(features.size()));
    }
    table.samples.row(static_cast<Index>(i)) = summarize_temporal(clips[i], mask).transpose();
  }
  return table;
}

ModalityTable apply_descriptor_mask(const ModalityTable& table, const DescriptorMask& mask) {
  if (mask.all()) return table;
  std::vector<Index> keep;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& name = table.columns[c].name;
    bool drop = false;
    for (auto d : kAllDescriptors) {
      const std::string suffix = "_" + std::string(to_string(d));
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        drop = !mask.contains(d);
        break;
      }
    }
    if (!drop) keep.push_back(static_cast<Index>(c));
  }
  if (keep.empty()) {
    throw SelectionError("descriptor mask removes every column of modality '" + table.name + "'");
  }
  return table.select_columns(keep);
}

// ---------------------------------------------------------------------------

ColumnFilter ColumnFilter::fit(const ModalityTable& train) {
  ColumnFilter f;
  f.n_columns_ = static_cast<std::size_t>(train.n_features());
  for (Index c = 0; c < train.n_features(); ++c) {
    double sum = 0.0;
    Index observed = 0;
    bool constant = true;
    double first = 0.0;
    for (Index r = 0; r < train.n_samples(); ++r) {
      const double v = train.samples(r, c);
      if (std::isnan(v)) continue;
      if (observed == 0) {
        first = v;
      } else if (v != first) {
        constant = false;
      }
      sum += v;
      ++observed;
    }
    if (observed == 0 || constant) {
      f.removed_.push_back(train.columns[static_cast<std::size_t>(c)].name);
      continue;
    }
    f.kept_.push_back(c);
    f.fill_.push_back(sum / static_cast<double>(observed));
  }
  if (f.kept_.empty()) {
    throw EmptyTableError("every column of modality '" + train.name +
                          "' is constant or missing");
  }
  return f;
}

ModalityTable ColumnFilter::apply(const ModalityTable& table) const {
  if (static_cast<std::size_t>(table.n_features()) != n_columns_) {
    throw ShapeError("column filter fitted on " + std::to_string(n_columns_) +
                     " columns, applied to " + std::to_string(table.n_features()));
  }
  ModalityTable out = table.select_columns(kept_);
  for (Index c = 0; c < out.n_features(); ++c) {
    for (Index r = 0; r < out.n_samples(); ++r) {
      if (std::isnan(out.samples(r, c))) out.samples(r, c) = fill_[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

CleanedTable drop_constant_and_null(const ModalityTable& table) {
  const auto filter = ColumnFilter::fit(table);
  return {filter.apply(table), filter.removed()};
}

std::string_view to_string(LevelFilter f) {
  switch (f) {
    case LevelFilter::all: return "all";
    case LevelFilter::high: return "high";
    case LevelFilter::low: return "low";
  }
  return "?";
}

LevelFilter parse_level_filter(std::string_view text) {
  if (text == "all") return LevelFilter::all;
  if (text == "high") return LevelFilter::high;
  if (text == "low") return LevelFilter::low;
  throw ConfigError("level filter must be all, high or low, got '" + std::string(text) + "'");
}

ModalityTable select_level(const ModalityTable& table, FeatureLevel level) {
  std::vector<Index> keep;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (table.columns[c].level == level) keep.push_back(static_cast<Index>(c));
  }
  if (keep.empty()) {
    throw SelectionError("modality '" + table.name + "' has no " +
                         std::string(to_string(level)) + "-level columns");
  }
  return table.select_columns(keep);
}

ModalityTable select_level(const ModalityTable& table, LevelFilter filter) {
  switch (filter) {
    case LevelFilter::all: return table;
    case LevelFilter::high: return select_level(table, FeatureLevel::high);
    case LevelFilter::low: return select_level(table, FeatureLevel::low);
  }
  return table;
}

// ---------------------------------------------------------------------------

Standardizer Standardizer::fit(const Matrix& train) {
  if (train.rows() < 1 || train.cols() < 1) throw InputError("cannot standardize an empty matrix");
  Standardizer s;
  const auto n = static_cast<double>(train.rows());
  s.mean_ = train.colwise().mean().transpose();
  s.scale_.resize(train.cols());
  for (Index c = 0; c < train.cols(); ++c) {
    const double var = (train.col(c).array() - s.mean_(c)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale_(c) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean_.size()) {
    throw ShapeError("standardizer fitted on " + std::to_string(mean_.size()) +
                     " columns, applied to " + std::to_string(x.cols()));
  }
  return (x.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array();
}

PcaModel PcaModel::fit(const Matrix& train, double target_ratio) {
  if (train.rows() < 2) throw FitError("PCA needs at least two training rows");
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
    throw FitError("PCA target ratio must lie in (0, 1]");
  }
  PcaModel model;
  const Index d = train.cols();
  model.mean_ = train.colwise().mean().transpose();
  const Matrix centered = train.rowwise() - model.mean_.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(train.rows());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw FitError("covariance eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  model.eigenvalues_.resize(d);
  Matrix vectors(d, d);
  for (Index i = 0; i < d; ++i) {
    model.eigenvalues_(i) = std::max(0.0, solver.eigenvalues()(d - 1 - i));
    vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }

  const double total = model.eigenvalues_.sum();
  Index k = 1;
  if (total > 0.0) {
    double cumulative = 0.0;
    for (k = 0; k < d;) {
      cumulative += model.eigenvalues_(k) / total;
      ++k;
      if (cumulative >= target_ratio - 1e-12) break;
    }
  }

  model.components_.resize(k, d);
  model.explained_ratio_.resize(k);
  for (Index i = 0; i < k; ++i) {
    Vector v = vectors.col(i);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    model.components_.row(i) = v.transpose();
    model.explained_ratio_(i) = total > 0.0 ? model.eigenvalues_(i) / total : 1.0;
  }
  return model;
}

Matrix PcaModel::apply(const Matrix& x) const {
  if (x.cols() != mean_.size()) {
    throw ShapeError("PCA fitted on " + std::to_string(mean_.size()) + " columns, applied to " +
                     std::to_string(x.cols()));
  }
  return (x.rowwise() - mean_.transpose()) * components_.transpose();
}

FeatureTransform FeatureTransform::fit(const ModalityTable& train, const Options& options) {
  FeatureTransform t;
  t.filter_ = ColumnFilter::fit(train);
  const ModalityTable cleaned = t.filter_.apply(train);
  t.standardizer_ = Standardizer::fit(cleaned.samples);
  if (options.pca && cleaned.n_features() > 2) {
    t.pca_ = PcaModel::fit(t.standardizer_.apply(cleaned.samples), options.pca_target_ratio);
    for (Index i = 0; i < t.pca_->n_components(); ++i) {
      t.output_columns_.push_back({train.name + "_pc" + std::to_string(i + 1), FeatureLevel::low});
    }
  } else {
    t.output_columns_ = cleaned.columns;
  }
  return t;
}

ModalityTable FeatureTransform::apply(const ModalityTable& table) const {
  const ModalityTable cleaned = filter_.apply(table);
  Matrix x = standardizer_.apply(cleaned.samples);
  if (pca_) x = pca_->apply(x);
  return ModalityTable{table.name, std::move(x), output_columns_};
}

}  // namespace fairmix
