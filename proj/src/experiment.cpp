#include "fairmix/experiment.hpp"

#include <algorithm>
#include <set>

#include "fairmix/augment.hpp"
#include "fairmix/error.hpp"
#include "fairmix/folds.hpp"
#include "fairmix/fusion.hpp"
#include "fairmix/preprocess.hpp"
#include "fairmix/random.hpp"
#include "fairmix/synthgen.hpp"

namespace fairmix {

Dataset load_config_dataset(const PipelineConfig& config) {
  if (config.manifest) return load_dataset(*config.manifest);
  if (config.synth) return generate(*config.synth);
  throw ConfigError("no data source configured");
}

Dataset select_features(const PipelineConfig& config, const Dataset& dataset) {
  std::vector<ModalityTable> tables;
  if (config.modalities.empty()) {
    tables = dataset.modalities();
  } else {
    for (const auto& name : config.modalities) {
      try {
        tables.push_back(dataset.modality(name));
      } catch (const Error&) {
        throw ConfigError("pipeline.modalities: unknown modality '" + name + "'");
      }
    }
  }
  for (auto& t : tables) t = select_level(apply_descriptor_mask(t, config.descriptors), config.level);
  return dataset.with_modalities(std::move(tables));
}

namespace {

MetricValue defined(double v) { return {v, "", ""}; }

MetricValue undefined(std::string reason, std::string label) {
  return {std::nullopt, std::move(reason), std::move(label)};
}

std::vector<Matrix> matrices(const Dataset& ds) {
  std::vector<Matrix> out;
  for (const auto& t : ds.modalities()) out.push_back(t.samples);
  return out;
}

bool single_class(const Dataset& ds) {
  const auto y = ds.labels();
  return y.size() == 0 || (y.array() == y(0)).all();
}

void guard_leakage(const Dataset& train, const Dataset& test) {
  std::set<std::string> train_ids;
  for (const auto& m : train.meta()) train_ids.insert(m.sample_id);
  for (const auto& m : test.meta()) {
    if (m.synthetic) throw ExperimentError("synthetic sample '" + m.sample_id + "' in a test split");
    if (train_ids.count(m.sample_id)) {
      throw ExperimentError("sample '" + m.sample_id + "' in both train and test");
    }
  }
}

}  // namespace

void fill_metrics(EvaluationReport& report) {
  const auto& preds = report.predictions;
  report.accuracy = defined(accuracy(preds));
  try {
    report.f1 = defined(f1_score(preds));
  } catch (const InputError&) {
    report.f1 = undefined("no_positives", "undef(no positives)");
  }
  report.uar = defined(uar(preds));
  report.absent_truth_classes = absent_truth_classes(preds);

  report.attributes.clear();
  for (std::size_t a = 0; a < preds.attribute_names.size(); ++a) {
    AttributeReport ar;
    ar.name = preds.attribute_names[a];
    for (const auto& r : preds.records) ++ar.group_sizes[r.attributes[a] == 1 ? 1 : 0];
    try {
      ar.ea = defined(equal_accuracy(preds, ar.name));
      const auto di = disparate_impact(preds, ar.name);
      ar.di = di.defined() ? defined(di.value) : undefined(di.reason(), di.label());
    } catch (const UndefinedMetricError&) {
      ar.ea = undefined("empty_group", "undef(empty group)");
      ar.di = undefined("empty_group", "undef(empty group)");
    }
    report.attributes.push_back(std::move(ar));
  }
}

EvaluationReport run_experiment(const PipelineConfig& config, const Dataset& dataset) {
  config.validate();
  const Dataset data = select_features(config, dataset);
  const auto folds = make_folds(data, config.cv, derive_seed(config.seed, "folds"));
  const FeatureTransform::Options transform{config.pca, config.pca_target_ratio};
  const std::uint64_t augment_seed = config.resolved_augment_seed();

  EvaluationReport report;
  report.seed = config.seed;
  report.augment = config.augment;
  report.config_fingerprint = config_fingerprint(config);
  report.warnings = data.warnings();
  report.predictions.attribute_names = data.attribute_names();

  std::vector<std::pair<std::size_t, PredictionRecord>> pooled;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    FoldReport fr;
    fr.index = static_cast<int>(f);
    fr.n_train = fold.train.size();
    fr.n_test = fold.test.size();
    fr.fingerprint = fold_fingerprint(data, fold);

    const Dataset train = data.subset(fold.train);
    const Dataset test = data.subset(fold.test);
    if (single_class(train)) {
      fr.skipped = true;
      fr.skip_reason = "training split has a single class";
      report.warnings.push_back("fold " + std::to_string(f) + " skipped: " + fr.skip_reason);
      report.folds.push_back(std::move(fr));
      continue;
    }

    std::vector<ModalityTable> train_tables;
    std::vector<ModalityTable> test_tables;
    for (const auto& table : train.modalities()) {
      const auto t = FeatureTransform::fit(table, transform);
      train_tables.push_back(t.apply(table));
      test_tables.push_back(t.apply(test.modality(table.name)));
    }
    const Dataset train_t = train.with_modalities(std::move(train_tables));
    const Dataset test_t = test.with_modalities(std::move(test_tables));

    MixFeatConfig mix{config.beta_alpha, config.beta_beta, derive_seed(augment_seed, "fold", f),
                      std::nullopt};
    const AugmentedDataset aug = augment(train_t, config.augment, mix);
    fr.n_synthetic = aug.synthetic.size();
    guard_leakage(aug.dataset, test_t);

    const auto model = FusionModel::fit(config.fusion, matrices(aug.dataset), aug.dataset.labels(),
                                        derive_seed(config.seed, "fit", f));
    const auto out = model.predict(matrices(test_t));

    std::size_t correct = 0;
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const auto& m = test_t.meta()[i];
      const auto row = static_cast<Index>(i);
      PredictionRecord rec;
      rec.sample_id = m.sample_id;
      rec.subject_id = m.subject_id;
      rec.true_label = m.label;
      rec.predicted_label = out.labels(row);
      rec.proba = {out.proba(row, 0), out.proba(row, 1)};
      rec.attributes = m.attributes;
      rec.fold = static_cast<int>(f);
      correct += rec.true_label == rec.predicted_label ? 1 : 0;
      pooled.emplace_back(fold.test[i], std::move(rec));
    }
    fr.accuracy = static_cast<double>(correct) / static_cast<double>(fold.test.size());
    report.folds.push_back(std::move(fr));
  }

  if (pooled.empty()) throw ExperimentError("every fold was skipped");
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [row, rec] : pooled) report.predictions.records.push_back(std::move(rec));
  report.predictions.validate();

  fill_metrics(report);
  return report;
}

}  // namespace fairmix
