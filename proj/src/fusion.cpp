#include "fairmix/fusion.hpp"

#include <algorithm>

#include "fairmix/error.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

std::string_view to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::early: return "early";
    case FusionStrategy::vote_hard: return "vote_hard";
    case FusionStrategy::vote_soft: return "vote_soft";
    case FusionStrategy::stack_hard: return "stack_hard";
    case FusionStrategy::stack_soft: return "stack_soft";
  }
  return "?";
}

FusionStrategy parse_fusion_strategy(std::string_view text) {
  if (text == "early") return FusionStrategy::early;
  if (text == "vote_hard") return FusionStrategy::vote_hard;
  if (text == "vote_soft") return FusionStrategy::vote_soft;
  if (text == "stack_hard") return FusionStrategy::stack_hard;
  if (text == "stack_soft") return FusionStrategy::stack_soft;
  throw ConfigError("unknown fusion strategy '" + std::string(text) + "'");
}

bool is_stacking(FusionStrategy s) {
  return s == FusionStrategy::stack_hard || s == FusionStrategy::stack_soft;
}

void FusionSpec::validate() const {
  base.validate();
  if (is_stacking(strategy)) meta.validate();
  if (stacking_folds < 2) throw ConfigError("fusion.stacking_folds must be at least 2");
}

Matrix early_fuse(std::span<const Matrix> modalities) {
  if (modalities.empty()) throw ShapeError("no modalities to fuse");
  const Index rows = modalities.front().rows();
  Index cols = 0;
  for (const auto& m : modalities) {
    if (m.rows() != rows) {
      throw ShapeError("modalities disagree on row count (" + std::to_string(rows) + " vs " +
                       std::to_string(m.rows()) + ")");
    }
    cols += m.cols();
  }
  Matrix out(rows, cols);
  Index c = 0;
  for (const auto& m : modalities) {
    out.middleCols(c, m.cols()) = m;
    c += m.cols();
  }
  return out;
}

namespace {

void check_inputs(std::span<const PredictorPtr> bases, std::span<const Matrix> x) {
  if (bases.size() != x.size()) {
    throw ConfigError("fusion has " + std::to_string(bases.size()) + " trained models but " +
                      std::to_string(x.size()) + " modalities were supplied");
  }
  if (x.empty()) throw ConfigError("no modalities supplied");
  for (const auto& m : x) {
    if (m.rows() != x.front().rows()) throw ShapeError("modalities disagree on row count");
  }
}

FusedOutput from_proba(Matrix proba) {
  FusedOutput out;
  out.labels = labels_from_proba(proba);
  out.proba = std::move(proba);
  return out;
}

}  // namespace

Matrix meta_features(FusionStrategy strategy, std::span<const PredictorPtr> bases,
                     std::span<const Matrix> x) {
  check_inputs(bases, x);
  const Index n = x.front().rows();
  const bool soft = strategy == FusionStrategy::stack_soft;
  const auto m = static_cast<Index>(bases.size());
  Matrix z(n, soft ? 2 * m : m);
  for (Index k = 0; k < m; ++k) {
    const Matrix p = bases[static_cast<std::size_t>(k)]->predict_proba(x[static_cast<std::size_t>(k)]);
    if (soft) {
      z.middleCols(2 * k, 2) = p;
    } else {
      z.col(k) = labels_from_proba(p).cast<double>();
    }
  }
  return z;
}

FusedOutput fuse_predict(const FusionSpec& spec, std::span<const PredictorPtr> bases,
                         const PredictorPtr& meta, std::span<const Matrix> x) {
  if (spec.strategy == FusionStrategy::early) {
    if (bases.size() != 1) throw ConfigError("early fusion uses exactly one trained model");
    return from_proba(bases.front()->predict_proba(early_fuse(x)));
  }
  check_inputs(bases, x);
  const Index n = x.front().rows();

  if (bases.size() == 1) return from_proba(bases.front()->predict_proba(x.front()));

  std::vector<Matrix> probs;
  probs.reserve(bases.size());
  for (std::size_t k = 0; k < bases.size(); ++k) probs.push_back(bases[k]->predict_proba(x[k]));

  Matrix mean = Matrix::Zero(n, 2);
  for (const auto& p : probs) mean += p;
  mean /= static_cast<double>(probs.size());

  switch (spec.strategy) {
    case FusionStrategy::vote_soft: return from_proba(std::move(mean));
    case FusionStrategy::vote_hard: {
      FusedOutput out;
      out.labels.resize(n);
      const auto m = probs.size();
      for (Index r = 0; r < n; ++r) {
        std::size_t ones = 0;
        for (const auto& p : probs) ones += p(r, 1) >= p(r, 0) ? 1 : 0;
        if (2 * ones != m) {
          out.labels(r) = 2 * ones > m ? 1 : 0;
          continue;
        }
        // Even split: follow the most confident model.
        double best = -1.0;
        bool votes0 = false;
        bool votes1 = false;
        for (const auto& p : probs) {
          const double conf = std::max(p(r, 0), p(r, 1));
          const bool vote1 = p(r, 1) >= p(r, 0);
          if (conf > best) {
            best = conf;
            votes0 = !vote1;
            votes1 = vote1;
          } else if (conf == best) {
            (vote1 ? votes1 : votes0) = true;
          }
        }
        out.labels(r) = votes1 ? 1 : 0;
      }
      out.proba = std::move(mean);
      return out;
    }
    case FusionStrategy::stack_hard:
    case FusionStrategy::stack_soft: {
      if (!meta) throw ConfigError("stacking fusion requires a trained meta-model");
      return from_proba(meta->predict_proba(meta_features(spec.strategy, bases, x)));
    }
    case FusionStrategy::early: break;
  }
  throw ConfigError("unhandled fusion strategy");
}

namespace {

Matrix take_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

Labels take_labels(const Labels& y, const std::vector<Index>& rows) {
  Labels out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = y(rows[i]);
  return out;
}

PredictorPtr fit_or_constant(const PredictorSpec& spec, const Matrix& x, const Labels& y) {
  TrainingInfo info;
  info.n_train = x.rows();
  for (Index i = 0; i < y.size(); ++i) ++info.class_counts[static_cast<std::size_t>(y(i))];
  if (info.class_counts[0] == 0 || info.class_counts[1] == 0) {
    return std::make_shared<ConstantPredictor>(info.class_counts[1] > 0 ? 1 : 0, x.cols(), info);
  }
  return fit(spec, x, y);
}

PredictorSpec seeded(PredictorSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

}  // namespace

StackingFit fit_stacking_meta(const FusionSpec& spec, std::span<const Matrix> train,
                              const Labels& y, std::uint64_t seed) {
  if (train.size() < 2) throw StackingError("stacking needs at least two modalities");
  const Index n = y.size();
  for (const auto& m : train) {
    if (m.rows() != n) throw ShapeError("modality rows disagree with label count");
  }
  if (n < 4) throw StackingError("stacking needs at least 4 training rows, got " + std::to_string(n));
  if ((y.array() == 0).count() == 0 || (y.array() == 1).count() == 0) {
    throw StackingError("stacking needs both classes in the training split");
  }
  const int k = n < 10 ? 2 : spec.stacking_folds;

  StackingFit out;
  out.fold_of_row = stratified_fold_assignment(y, k, derive_seed(seed, "stacking-folds"));
  out.fold_train_rows.resize(static_cast<std::size_t>(k));
  std::vector<std::vector<Index>> test_rows(static_cast<std::size_t>(k));
  for (Index r = 0; r < n; ++r) {
    const auto f = static_cast<std::size_t>(out.fold_of_row[static_cast<std::size_t>(r)]);
    test_rows[f].push_back(r);
    for (int g = 0; g < k; ++g) {
      if (static_cast<std::size_t>(g) != f) out.fold_train_rows[static_cast<std::size_t>(g)].push_back(r);
    }
  }

  const bool soft = spec.strategy == FusionStrategy::stack_soft;
  const auto m = static_cast<Index>(train.size());
  out.train_meta_features = Matrix::Zero(n, soft ? 2 * m : m);
  for (int f = 0; f < k; ++f) {
    const auto& tr = out.fold_train_rows[static_cast<std::size_t>(f)];
    const auto& te = test_rows[static_cast<std::size_t>(f)];
    if (te.empty()) continue;
    const Labels ytr = take_labels(y, tr);
    for (Index mod = 0; mod < m; ++mod) {
      const auto& x = train[static_cast<std::size_t>(mod)];
      const auto base = fit_or_constant(
          seeded(spec.base, derive_seed(seed, "stacking-base", static_cast<std::uint64_t>(f * m + mod))),
          take_rows(x, tr), ytr);
      const Matrix p = base->predict_proba(take_rows(x, te));
      for (std::size_t i = 0; i < te.size(); ++i) {
        const Index r = te[i];
        if (soft) {
          out.train_meta_features.block(r, 2 * mod, 1, 2) = p.row(static_cast<Index>(i));
        } else {
          out.train_meta_features(r, mod) = p(static_cast<Index>(i), 1) >= p(static_cast<Index>(i), 0) ? 1.0 : 0.0;
        }
      }
    }
  }

  out.meta = fit_or_constant(seeded(spec.meta, derive_seed(seed, "stacking-meta")),
                             out.train_meta_features, y);
  for (Index mod = 0; mod < m; ++mod) {
    out.bases.push_back(fit(seeded(spec.base, derive_seed(seed, "base", static_cast<std::uint64_t>(mod))),
                            train[static_cast<std::size_t>(mod)], y));
  }
  return out;
}

FusionModel FusionModel::fit(const FusionSpec& spec, std::span<const Matrix> train,
                             const Labels& y, std::uint64_t seed) {
  spec.validate();
  if (train.empty()) throw ConfigError("no modalities to train on");
  FusionModel model;
  model.spec_ = spec;
  model.n_modalities_ = train.size();

  if (spec.strategy == FusionStrategy::early) {
    model.bases_.push_back(
        fairmix::fit(seeded(spec.base, derive_seed(seed, "base", 0)), early_fuse(train), y));
    return model;
  }
  if (is_stacking(spec.strategy) && train.size() >= 2) {
    model.stacking_ = fit_stacking_meta(spec, train, y, seed);
    model.bases_ = model.stacking_->bases;
    model.meta_ = model.stacking_->meta;
    return model;
  }
  for (std::size_t m = 0; m < train.size(); ++m) {
    model.bases_.push_back(fairmix::fit(seeded(spec.base, derive_seed(seed, "base", m)), train[m], y));
  }
  return model;
}

FusedOutput FusionModel::predict(std::span<const Matrix> x) const {
  if (x.size() != n_modalities_) {
    throw ConfigError("fusion model expects " + std::to_string(n_modalities_) +
                      " modalities, got " + std::to_string(x.size()));
  }
  return fuse_predict(spec_, bases_, meta_, x);
}

}  // namespace fairmix
