#include <doctest.h>

#include <set>

#include "fairmix/error.hpp"
#include "fairmix/folds.hpp"
#include "fold_checks.hpp"
#include "test_util.hpp"

using namespace fairmix;
using fairmix::testing::fold_violation;
using fairmix::testing::random_dataset;

TEST_SUITE("folds") {

TEST_CASE("loso gives one fold per subject") {
  const auto ds = random_dataset(1, 11, 3, 1);
  const auto folds = make_folds(ds, {CvMode::loso, 5, true, true}, 0);
  REQUIRE(folds.size() == 11);
  CHECK(fold_violation(ds, folds, true, true) == "");
  // First-appearance order.
  CHECK(ds.meta()[folds[0].test[0]].subject_id == ds.meta()[0].subject_id);
  CHECK(folds[3].test.size() == 3);
}

TEST_CASE("ungrouped five-fold partitions fifty rows") {
  const auto ds = random_dataset(2, 50, 1, 1);
  for (bool stratified : {false, true}) {
    const auto folds = make_folds(ds, {CvMode::kfold, 5, false, stratified}, 7);
    REQUIRE(folds.size() == 5);
    CHECK(fold_violation(ds, folds, false, false) == "");
    for (const auto& f : folds) CHECK(f.test.size() == 10);
  }
}

TEST_CASE("stratification keeps label counts even") {
  const auto ds = random_dataset(3, 60, 1, 1);
  const auto folds = make_folds(ds, {CvMode::kfold, 4, false, true}, 3);
  std::set<std::size_t> positives;
  for (const auto& f : folds) {
    std::size_t p = 0;
    for (auto r : f.test) p += static_cast<std::size_t>(ds.meta()[r].label);
    positives.insert(p);
  }
  CHECK(*positives.rbegin() - *positives.begin() <= 1);
}

TEST_CASE("grouped folds never split a subject") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto ds = random_dataset(100 + seed, 7 + static_cast<int>(seed % 13), 1 + static_cast<int>(seed % 5), 1);
    for (bool stratified : {false, true}) {
      const auto folds = make_folds(ds, {CvMode::kfold, 5, true, stratified}, seed);
      CHECK(fold_violation(ds, folds, true, false) == "");
    }
  }
}

TEST_CASE("fewer subjects than folds drops empty folds") {
  const auto ds = random_dataset(4, 3, 4, 1);
  const auto folds = make_folds(ds, {CvMode::kfold, 5, true, true}, 1);
  CHECK(folds.size() == 3);
  CHECK(fold_violation(ds, folds, true, false) == "");
}

TEST_CASE("determinism and fingerprints") {
  const auto ds = random_dataset(5, 20, 2, 1);
  const CvSpec spec{CvMode::kfold, 5, true, true};
  const auto a = make_folds(ds, spec, 11);
  const auto b = make_folds(ds, spec, 11);
  REQUIRE(a.size() == b.size());
  for (std::size_t f = 0; f < a.size(); ++f) {
    CHECK(a[f].test == b[f].test);
    CHECK(fold_fingerprint(ds, a[f]) == fold_fingerprint(ds, b[f]));
  }
  CHECK(fold_fingerprint(ds, a[0]) != fold_fingerprint(ds, a[1]));
  CHECK(fold_fingerprint(ds, a[0]).size() == 16);

  const auto c = make_folds(ds, spec, 12);
  bool differs = false;
  for (std::size_t f = 0; f < std::min(a.size(), c.size()); ++f) differs |= a[f].test != c[f].test;
  CHECK(differs);
}

TEST_CASE("cv spec validation") {
  CHECK_THROWS_AS((CvSpec{CvMode::kfold, 1, true, true}.validate()), ConfigError);
  CHECK_NOTHROW((CvSpec{CvMode::loso, 1, true, true}.validate()));
  CHECK(parse_cv_mode("loso") == CvMode::loso);
  CHECK_THROWS_AS(parse_cv_mode("holdout"), ConfigError);
}

}  // TEST_SUITE
