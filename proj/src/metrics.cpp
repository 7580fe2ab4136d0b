#include "fairmix/metrics.hpp"

#include <cmath>

#include "fairmix/error.hpp"

namespace fairmix {

std::size_t PredictionSet::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attribute_names.size(); ++i) {
    if (attribute_names[i] == name) return i;
  }
  throw InputError("unknown attribute '" + std::string(name) + "'");
}

void PredictionSet::validate() const {
  for (const auto& r : records) {
    if ((r.true_label != 0 && r.true_label != 1) ||
        (r.predicted_label != 0 && r.predicted_label != 1)) {
      throw InputError("sample '" + r.sample_id + "': labels must be 0 or 1");
    }
    if (std::abs(r.proba[0] + r.proba[1] - 1.0) > 1e-9) {
      throw InputError("sample '" + r.sample_id + "': probabilities do not sum to one");
    }
    if (r.attributes.size() != attribute_names.size()) {
      throw InputError("sample '" + r.sample_id + "': attribute count mismatch");
    }
  }
}

namespace {

void require_nonempty(const PredictionSet& preds) {
  if (preds.empty()) throw InputError("empty prediction set");
}

struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

Confusion confusion(const PredictionSet& preds) {
  Confusion c;
  for (const auto& r : preds.records) {
    if (r.true_label == 1) {
      (r.predicted_label == 1 ? c.tp : c.fn)++;
    } else {
      (r.predicted_label == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

struct GroupCounts {
  std::size_t n = 0;
  std::size_t errors = 0;
  std::size_t positives = 0;
};

std::array<GroupCounts, 2> group_counts(const PredictionSet& preds, std::string_view attribute) {
  const auto a = preds.attribute_index(attribute);
  std::array<GroupCounts, 2> g{};
  for (const auto& r : preds.records) {
    auto& c = g[static_cast<std::size_t>(r.attributes[a] == 1)];
    ++c.n;
    c.errors += r.predicted_label != r.true_label ? 1 : 0;
    c.positives += r.predicted_label == 1 ? 1 : 0;
  }
  for (int v = 0; v < 2; ++v) {
    if (g[static_cast<std::size_t>(v)].n == 0) {
      throw UndefinedMetricError("group " + std::string(attribute) + "=" + std::to_string(v) +
                                 " is empty");
    }
  }
  return g;
}

}  // namespace

double accuracy(const PredictionSet& preds) {
  require_nonempty(preds);
  const auto c = confusion(preds);
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(preds.size());
}

double f1_score(const PredictionSet& preds) {
  require_nonempty(preds);
  const auto c = confusion(preds);
  if (c.tp + c.fn + c.fp == 0) {
    throw InputError("F1 undefined: no true or predicted positives");
  }
  // 2PR/(P+R) = 2tp / (2tp + fp + fn)
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
}

double uar(const PredictionSet& preds) {
  require_nonempty(preds);
  const auto c = confusion(preds);
  const double r1 = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  const double r0 = c.tn + c.fp > 0 ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp) : 0.0;
  return 0.5 * (r0 + r1);
}

std::vector<int> absent_truth_classes(const PredictionSet& preds) {
  bool seen[2] = {false, false};
  for (const auto& r : preds.records) seen[r.true_label == 1] = true;
  std::vector<int> out;
  for (int c = 0; c < 2; ++c) {
    if (!seen[c]) out.push_back(c);
  }
  return out;
}

double equal_accuracy(const PredictionSet& preds, std::string_view attribute) {
  const auto g = group_counts(preds, attribute);
  const double err1 = static_cast<double>(g[1].errors) / static_cast<double>(g[1].n);
  const double err0 = static_cast<double>(g[0].errors) / static_cast<double>(g[0].n);
  return std::abs(err1 - err0);
}

DisparateImpact disparate_impact(const PredictionSet& preds, std::string_view attribute) {
  const auto g = group_counts(preds, attribute);
  DisparateImpact di;
  if (g[1].positives == 0) {
    di.status = g[0].positives == 0 ? DisparateImpact::Status::zero_over_zero
                                    : DisparateImpact::Status::division_by_zero;
    return di;
  }
  const double minority = static_cast<double>(g[0].positives) / static_cast<double>(g[0].n);
  const double majority = static_cast<double>(g[1].positives) / static_cast<double>(g[1].n);
  di.value = minority / majority;
  return di;
}

std::string DisparateImpact::label() const {
  switch (status) {
    case Status::defined: return "";
    case Status::zero_over_zero: return "undef(0/0)";
    case Status::division_by_zero: return "undef(\xC3\xB7" "0)";
  }
  return "";
}

std::string DisparateImpact::reason() const {
  switch (status) {
    case Status::defined: return "";
    case Status::zero_over_zero: return "0/0";
    case Status::division_by_zero: return "division_by_zero";
  }
  return "";
}

}  // namespace fairmix
