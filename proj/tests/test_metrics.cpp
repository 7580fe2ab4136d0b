#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fairmix/error.hpp"
#include "fairmix/metrics.hpp"
#include "metric_oracle.hpp"

using namespace fairmix;

namespace {

// `n` rows of group g, of which `wrong` are misclassified and `positive` are
// predicted positive.
void add_group(PredictionSet& p, int g, int n, int wrong, int positive) {
  for (int i = 0; i < n; ++i) {
    PredictionRecord r;
    r.sample_id = "g" + std::to_string(g) + "_" + std::to_string(i);
    r.predicted_label = i < positive ? 1 : 0;
    r.true_label = i < wrong ? 1 - r.predicted_label : r.predicted_label;
    r.attributes = {g};
    p.records.push_back(r);
  }
}

PredictionSet from_pairs(const std::vector<std::pair<int, int>>& truth_pred) {
  PredictionSet p;
  p.attribute_names = {"gender"};
  int i = 0;
  for (auto [t, y] : truth_pred) {
    PredictionRecord r;
    r.sample_id = std::to_string(i);
    r.true_label = t;
    r.predicted_label = y;
    r.attributes = {i++ % 2};
    p.records.push_back(r);
  }
  return p;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("equal accuracy") {
  PredictionSet p;
  p.attribute_names = {"gender"};
  add_group(p, 1, 10, 2, 0);
  add_group(p, 0, 20, 7, 0);
  CHECK(equal_accuracy(p, "gender") == doctest::Approx(0.15).epsilon(1e-14));

  PredictionSet perfect;
  perfect.attribute_names = {"gender"};
  add_group(perfect, 1, 5, 0, 2);
  add_group(perfect, 0, 5, 0, 3);
  CHECK(equal_accuracy(perfect, "gender") == 0.0);

  PredictionSet extreme;
  extreme.attribute_names = {"gender"};
  add_group(extreme, 1, 4, 0, 2);
  add_group(extreme, 0, 6, 6, 3);
  CHECK(equal_accuracy(extreme, "gender") == 1.0);
}

TEST_CASE("disparate impact") {
  PredictionSet p;
  p.attribute_names = {"gender"};
  add_group(p, 0, 10, 0, 3);
  add_group(p, 1, 10, 0, 6);
  const auto di = disparate_impact(p, "gender");
  REQUIRE(di.defined());
  CHECK(di.value == doctest::Approx(0.5).epsilon(1e-14));

  PredictionSet eq;
  eq.attribute_names = {"gender"};
  add_group(eq, 0, 4, 0, 2);
  add_group(eq, 1, 8, 0, 4);
  CHECK(disparate_impact(eq, "gender").value == 1.0);

  PredictionSet div0;
  div0.attribute_names = {"gender"};
  add_group(div0, 0, 4, 0, 1);
  add_group(div0, 1, 4, 0, 0);
  const auto d = disparate_impact(div0, "gender");
  CHECK(d.status == DisparateImpact::Status::division_by_zero);
  CHECK(d.label() == "undef(\xC3\xB7" "0)");
  CHECK_FALSE(d.as_optional().has_value());

  PredictionSet zz;
  zz.attribute_names = {"gender"};
  add_group(zz, 0, 4, 0, 0);
  add_group(zz, 1, 4, 0, 0);
  CHECK(disparate_impact(zz, "gender").label() == "undef(0/0)");
}

TEST_CASE("empty group is undefined") {
  PredictionSet p;
  p.attribute_names = {"gender"};
  add_group(p, 1, 5, 1, 2);
  try {
    equal_accuracy(p, "gender");
    FAIL("expected UndefinedMetricError");
  } catch (const UndefinedMetricError& e) {
    CHECK(std::string(e.what()).find("gender=0") != std::string::npos);
  }
  CHECK_THROWS_AS(disparate_impact(p, "gender"), UndefinedMetricError);
  CHECK_THROWS_AS(equal_accuracy(p, "race"), InputError);
}

TEST_CASE("performance metrics") {
  // recall 0.5 on class 0, 1.0 on class 1
  const auto p = from_pairs({{0, 0}, {0, 1}, {1, 1}, {1, 1}});
  CHECK(uar(p) == 0.75);

  const auto perfect = from_pairs({{0, 0}, {1, 1}, {1, 1}});
  CHECK(accuracy(perfect) == 1.0);
  CHECK(f1_score(perfect) == 1.0);
  CHECK(uar(perfect) == 1.0);

  const auto all_pos = from_pairs({{0, 1}, {1, 1}, {0, 1}, {1, 1}});
  CHECK(accuracy(all_pos) == 0.5);
  CHECK(uar(all_pos) == 0.5);
  CHECK(f1_score(all_pos) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto no_tp = from_pairs({{1, 0}, {0, 0}});
  CHECK(f1_score(no_tp) == 0.0);
  CHECK_THROWS_AS(f1_score(from_pairs({{0, 0}, {0, 0}})), InputError);

  const auto only_neg = from_pairs({{0, 0}, {0, 1}});
  CHECK(uar(only_neg) == 0.25);
  CHECK(absent_truth_classes(only_neg) == std::vector<int>{1});

  CHECK_THROWS_AS(accuracy(PredictionSet{}), InputError);
}

TEST_CASE("validation") {
  auto p = from_pairs({{0, 0}, {1, 1}});
  p.records[0].proba = {0.3, 0.6};
  CHECK_THROWS_AS(p.validate(), InputError);
  p.records[0].proba = {0.4, 0.6};
  p.records[1].predicted_label = 2;
  CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("agreement with a counting oracle") {
  std::mt19937_64 rng(77);
  int undefined_di = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = fairmix::testing::random_prediction_set(rng);
    const auto o = fairmix::testing::oracle_metrics(p, 0);
    CHECK(std::abs(accuracy(p) - o.accuracy) <= 1e-12);
    CHECK(std::abs(uar(p) - o.uar) <= 1e-12);
    if (o.f1) {
      CHECK(std::abs(f1_score(p) - *o.f1) <= 1e-12);
    } else {
      CHECK_THROWS_AS(f1_score(p), InputError);
    }
    using Di = fairmix::testing::OracleMetrics::Di;
    if (o.di_status == Di::empty_group) {
      CHECK_THROWS_AS(equal_accuracy(p, "gender"), UndefinedMetricError);
      CHECK_THROWS_AS(disparate_impact(p, "gender"), UndefinedMetricError);
      continue;
    }
    CHECK(std::abs(equal_accuracy(p, "gender") - *o.ea) <= 1e-12);
    const auto di = disparate_impact(p, "gender");
    switch (o.di_status) {
      case Di::value: CHECK(std::abs(di.value - o.di) <= 1e-12 * std::max(1.0, o.di)); break;
      case Di::zero_over_zero: CHECK(di.status == DisparateImpact::Status::zero_over_zero); break;
      case Di::division_by_zero: CHECK(di.status == DisparateImpact::Status::division_by_zero); break;
      default: break;
    }
    undefined_di += di.defined() ? 0 : 1;
  }
  CHECK(undefined_di > 20);
}

TEST_CASE("fairness metrics ignore order and probabilities") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = fairmix::testing::random_prediction_set(rng);
    if (fairmix::testing::oracle_metrics(p, 0).di_status ==
        fairmix::testing::OracleMetrics::Di::empty_group) {
      continue;
    }
    const double ea = equal_accuracy(p, "gender");
    const auto di = disparate_impact(p, "gender");
    auto q = p;
    std::shuffle(q.records.begin(), q.records.end(), rng);
    for (auto& r : q.records) r.proba = {0.5, 0.5};
    CHECK(equal_accuracy(q, "gender") == ea);
    const auto di2 = disparate_impact(q, "gender");
    CHECK(di2.status == di.status);
    CHECK(di2.value == di.value);
  }
}

}  // TEST_SUITE
