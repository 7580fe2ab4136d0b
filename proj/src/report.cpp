#include "fairmix/report.hpp"

#include <cstdio>

namespace fairmix {

namespace {

void put_metric(Json& obj, const std::string& key, const MetricValue& v) {
  if (v.value) {
    obj[key] = *v.value;
  } else {
    obj[key] = nullptr;
    obj[key + "_reason"] = v.reason;
  }
}

}  // namespace

std::string format_metric(const MetricValue& v) {
  if (!v.value) return v.label;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v.value);
  return buf;
}

Json config_to_json(const PipelineConfig& config) {
  Json obj = Json::object();
  for (const auto& [k, v] : to_key_values(config)) obj[k] = v;
  return obj;
}

Json dataset_summary(const Dataset& dataset) {
  Json d;
  d["n_samples"] = dataset.n_samples();
  Json mods = Json::array();
  for (const auto& t : dataset.modalities()) {
    mods.push_back(Json{{"name", t.name}, {"n_features", t.n_features()}});
  }
  d["modalities"] = mods;
  d["attributes"] = dataset.attribute_names();
  return d;
}

Json report_to_json(const EvaluationReport& r) {
  Json j;
  j["augment"] = std::string(to_string(r.augment));
  j["seed"] = r.seed;
  j["config_fingerprint"] = r.config_fingerprint;

  Json overall;
  put_metric(overall, "accuracy", r.accuracy);
  put_metric(overall, "f1", r.f1);
  put_metric(overall, "uar", r.uar);
  overall["absent_truth_classes"] = r.absent_truth_classes;
  overall["n_predictions"] = r.predictions.size();
  j["overall"] = overall;

  Json attrs = Json::object();
  for (const auto& a : r.attributes) {
    Json obj;
    put_metric(obj, "ea", a.ea);
    put_metric(obj, "di", a.di);
    obj["group_sizes"] = Json{{"0", a.group_sizes[0]}, {"1", a.group_sizes[1]}};
    attrs[a.name] = obj;
  }
  j["attributes"] = attrs;

  Json folds = Json::array();
  for (const auto& f : r.folds) {
    Json fj;
    fj["index"] = f.index;
    fj["fingerprint"] = f.fingerprint;
    fj["n_train"] = f.n_train;
    fj["n_test"] = f.n_test;
    fj["n_synthetic"] = f.n_synthetic;
    fj["skipped"] = f.skipped;
    if (f.skipped) fj["skip_reason"] = f.skip_reason;
    fj["accuracy"] = f.accuracy ? Json(*f.accuracy) : Json(nullptr);
    folds.push_back(fj);
  }
  j["folds"] = folds;
  j["warnings"] = r.warnings;
  return j;
}

Json audit_document(const PipelineConfig& config, const Dataset& dataset, const EvaluationReport& report) {
  Json doc;
  doc["command"] = "audit";
  doc["seed"] = config.seed;
  doc["config_fingerprint"] = config_fingerprint(config);
  doc["config"] = config_to_json(config);
  doc["dataset"] = dataset_summary(dataset);
  doc["report"] = report_to_json(report);
  return doc;
}

Json compare_document(const PipelineConfig& config, const Dataset& dataset,
                      const std::vector<NamedReport>& arms) {
  Json doc;
  doc["command"] = "compare";
  doc["seed"] = config.seed;
  doc["config_fingerprint"] = config_fingerprint(config);
  doc["config"] = config_to_json(config);
  doc["dataset"] = dataset_summary(dataset);
  Json arms_json = Json::object();
  for (const auto& [name, report] : arms) arms_json[name] = report_to_json(*report);
  doc["arms"] = arms_json;
  return doc;
}

std::string markdown_table(const std::vector<NamedReport>& arms) {
  std::string out = "| Metric |";
  std::string rule = "|---|";
  for (const auto& [name, r] : arms) {
    out += " " + name + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";

  const auto row = [&](const std::string& label, auto&& get) {
    out += "| " + label + " |";
    for (const auto& [name, r] : arms) out += " " + format_metric(get(*r)) + " |";
    out += "\n";
  };
  row("Overall Acc", [](const EvaluationReport& r) { return r.accuracy; });
  row("Overall F1", [](const EvaluationReport& r) { return r.f1; });
  row("Overall UAR", [](const EvaluationReport& r) { return r.uar; });
  if (!arms.empty()) {
    const auto& first = *arms.front().second;
    for (std::size_t a = 0; a < first.attributes.size(); ++a) {
      row("EA_" + first.attributes[a].name,
          [a](const EvaluationReport& r) { return r.attributes[a].ea; });
    }
    for (std::size_t a = 0; a < first.attributes.size(); ++a) {
      row("DI_" + first.attributes[a].name,
          [a](const EvaluationReport& r) { return r.attributes[a].di; });
    }
  }
  return out;
}

std::string predictions_csv(const std::vector<NamedReport>& arms) {
  const bool with_arm = arms.size() > 1;
  std::string out;
  if (arms.empty()) return out;
  if (with_arm) out += "arm,";
  out += "sample_id,subject_id,fold,true_label,predicted_label,proba_0,proba_1";
  for (const auto& a : arms.front().second->predictions.attribute_names) out += "," + a;
  out += "\n";
  for (const auto& [name, r] : arms) {
    for (const auto& rec : r->predictions.records) {
      if (with_arm) out += name + ",";
      out += rec.sample_id + "," + rec.subject_id + "," + std::to_string(rec.fold) + "," +
             std::to_string(rec.true_label) + "," + std::to_string(rec.predicted_label) + "," +
             format_double(rec.proba[0]) + "," + format_double(rec.proba[1]);
      for (int v : rec.attributes) out += "," + std::to_string(v);
      out += "\n";
    }
  }
  return out;
}

}  // namespace fairmix
