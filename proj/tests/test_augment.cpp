#include <doctest.h>

#include <algorithm>
#include <map>

#include "fairmix/augment.hpp"
#include "fairmix/error.hpp"
#include "test_util.hpp"

using namespace fairmix;
using fairmix::testing::CellCount;
using fairmix::testing::dataset_from_cells;

namespace {

std::map<CellKey, std::size_t> cell_counts(const Dataset& ds) {
  std::map<CellKey, std::size_t> out;
  for (const auto& s : ds.meta()) ++out[CellKey{s.attributes, s.label}];
  return out;
}

Dataset two_attribute_train(std::uint64_t seed) {
  return dataset_from_cells({{{1, 1}, 1, 6},
                             {{0, 1}, 1, 2},
                             {{1, 0}, 1, 3},
                             {{0, 0}, 1, 1},
                             {{1, 1}, 0, 5},
                             {{0, 1}, 0, 4},
                             {{1, 0}, 0, 2},
                             {{0, 0}, 0, 1}},
                            seed);
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("max rule") {
  const auto ds = dataset_from_cells({{{1, 1}, 1, 10}, {{0, 1}, 1, 4}}, 1);
  const auto plan = plan_balancing(ds);
  REQUIRE(plan.cells.size() == 2);
  for (const auto& c : plan.cells) CHECK(c.target_count == 10);
  CHECK(plan.total_synthetic() == 6);
  // The other six combinations are empty.
  CHECK(plan.unreachable.size() == 6);
}

TEST_CASE("balanced input gives a no-op plan") {
  const auto ds = dataset_from_cells({{{1}, 1, 3}, {{0}, 1, 3}, {{1}, 0, 3}, {{0}, 0, 3}}, 2);
  const auto plan = plan_balancing(ds);
  CHECK(plan.total_synthetic() == 0);
  for (const auto& c : plan.cells) CHECK(c.deficit() == 0);
  const auto ros = random_oversample(ds, plan, 5);
  CHECK(ros.dataset == ds);
  CHECK(ros.synthetic.empty());
  const auto mix = mixfeat(ds, plan, {});
  CHECK(mix.dataset == ds);
}

TEST_CASE("four cells of 3, 5, 7 and 9") {
  const auto ds = dataset_from_cells({{{0}, 0, 3}, {{0}, 1, 5}, {{1}, 0, 7}, {{1}, 1, 9}}, 3);
  const auto plan = plan_balancing(ds);
  for (const auto& c : plan.cells) CHECK(c.target_count == 9);
  CHECK(plan.total_synthetic() == 12);
}

TEST_CASE("random oversampling copies rows") {
  const auto ds = dataset_from_cells({{{0}, 1, 3}, {{1}, 1, 5}}, 4);
  const auto plan = plan_balancing(ds, AugmentMethod::random_oversample);
  const auto out = random_oversample(ds, plan, 42);
  REQUIRE(out.synthetic.size() == 2);
  CHECK(out.dataset.n_samples() == 10);
  for (const auto& s : out.synthetic) {
    const auto r = static_cast<Index>(s.row);
    const auto p = static_cast<Index>(s.parent_i);
    CHECK(s.parent_i < 3);
    for (std::size_t m = 0; m < ds.modalities().size(); ++m) {
      CHECK(out.dataset.modalities()[m].samples.row(r) == ds.modalities()[m].samples.row(p));
    }
    const auto& meta = out.dataset.meta()[s.row];
    CHECK(meta.synthetic);
    CHECK(meta.subject_id == ds.meta()[s.parent_i].subject_id);
    CHECK(meta.sample_id != ds.meta()[s.parent_i].sample_id);
    CHECK(meta.label == 1);
    CHECK(meta.attributes == std::vector<int>{0});
  }
  CHECK(random_oversample(ds, plan, 42).dataset == out.dataset);
}

TEST_CASE("mix_value") {
  CHECK(mix_value(1.0, 3.0, 0.25) == 2.5);
  CHECK(mix_value(2.0, 6.0, 0.25) == 5.0);
  CHECK(mix_value(0.1, 0.7, 1.0) == 0.1);
  CHECK(mix_value(0.1, 0.7, 0.0) == 0.7);
  const double v = mix_value(0.1, 0.1 + 1e-16, 0.3);
  CHECK(v >= 0.1);
  CHECK(v <= 0.1 + 1e-16);
}

TEST_CASE("mixfeat with a fixed weight follows the convex combination") {
  // Cell (0, 1) holds two rows; one synthetic row is needed.
  auto ds = dataset_from_cells({{{0}, 1, 2}, {{1}, 1, 3}}, 5, {2});
  auto tables = ds.modalities();
  tables[0].samples.row(0) << 1.0, 2.0;
  tables[0].samples.row(1) << 3.0, 6.0;
  ds = ds.with_modalities(tables);

  MixFeatConfig cfg;
  cfg.fixed_lambdas = std::vector<double>{0.25};
  const auto out = mixfeat(ds, plan_balancing(ds), cfg);
  REQUIRE(out.synthetic.size() == 1);
  const auto& s = out.synthetic[0];
  CHECK(s.parent_i != s.parent_j);
  const Eigen::RowVector2d got = out.dataset.modalities()[0].samples.row(static_cast<Index>(s.row));
  if (s.parent_i == 0) {
    CHECK(got(0) == 2.5);
    CHECK(got(1) == 5.0);
  } else {
    CHECK(got(0) == 1.5);
    CHECK(got(1) == 3.0);
  }
  CHECK(out.dataset.meta()[s.row].subject_id.rfind("mix-", 0) == 0);
}

TEST_CASE("mixfeat endpoints and per-modality weights") {
  const auto ds = two_attribute_train(6);
  const auto plan = plan_balancing(ds);

  MixFeatConfig ones;
  ones.fixed_lambdas = std::vector<double>{1.0, 1.0};
  const auto a = mixfeat(ds, plan, ones);
  for (const auto& s : a.synthetic) {
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK(a.dataset.modalities()[m].samples.row(static_cast<Index>(s.row)) ==
            ds.modalities()[m].samples.row(static_cast<Index>(s.parent_i)));
    }
  }

  MixFeatConfig split;
  split.fixed_lambdas = std::vector<double>{1.0, 0.0};
  const auto b = mixfeat(ds, plan, split);
  for (const auto& s : b.synthetic) {
    CHECK(b.dataset.modalities()[0].samples.row(static_cast<Index>(s.row)) ==
          ds.modalities()[0].samples.row(static_cast<Index>(s.parent_i)));
    CHECK(b.dataset.modalities()[1].samples.row(static_cast<Index>(s.row)) ==
          ds.modalities()[1].samples.row(static_cast<Index>(s.parent_j)));
  }
}

TEST_CASE("singleton cells duplicate their only row") {
  const auto ds = dataset_from_cells({{{0}, 0, 1}, {{1}, 0, 4}}, 7);
  const auto out = mixfeat(ds, plan_balancing(ds), {1.0, 1.0, 3, std::nullopt});
  REQUIRE(out.synthetic.size() == 3);
  for (const auto& s : out.synthetic) {
    CHECK(s.parent_i == 0);
    CHECK(s.parent_j == 0);
    CHECK(out.dataset.modalities()[0].samples.row(static_cast<Index>(s.row)) ==
          ds.modalities()[0].samples.row(0));
  }
}

TEST_CASE("mixfeat properties") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = two_attribute_train(100 + seed);
    const auto plan = plan_balancing(ds);
    const auto out = mixfeat(ds, plan, {1.0, 1.0, seed, std::nullopt});

    // Original rows untouched and first.
    for (std::size_t m = 0; m < ds.modalities().size(); ++m) {
      CHECK(out.dataset.modalities()[m].samples.topRows(static_cast<Index>(ds.n_samples())) ==
            ds.modalities()[m].samples);
    }
    for (const auto& s : out.synthetic) {
      const auto& child = out.dataset.meta()[s.row];
      for (auto p : {s.parent_i, s.parent_j}) {
        CHECK(child.label == ds.meta()[p].label);
        CHECK(child.attributes == ds.meta()[p].attributes);
      }
      for (std::size_t m = 0; m < ds.modalities().size(); ++m) {
        const auto& src = ds.modalities()[m].samples;
        const auto& dst = out.dataset.modalities()[m].samples;
        for (Index j = 0; j < src.cols(); ++j) {
          const double a = src(static_cast<Index>(s.parent_i), j);
          const double b = src(static_cast<Index>(s.parent_j), j);
          const double v = dst(static_cast<Index>(s.row), j);
          CHECK(v >= std::min(a, b));
          CHECK(v <= std::max(a, b));
        }
      }
    }
    std::size_t max_count = 0;
    for (const auto& [k, n] : cell_counts(ds)) max_count = std::max(max_count, n);
    for (const auto& [k, n] : cell_counts(out.dataset)) CHECK(n == max_count);

    CHECK(mixfeat(ds, plan, {1.0, 1.0, seed, std::nullopt}).dataset == out.dataset);
  }
}

TEST_CASE("plan mismatches") {
  const auto ds = dataset_from_cells({{{0}, 0, 2}, {{1}, 0, 4}}, 8);
  auto plan = plan_balancing(ds);
  plan.cells.push_back({CellKey{{0}, 1}, 0, 4});
  CHECK_THROWS_AS(mixfeat(ds, plan, {}), UnreachableCellError);
  CHECK_THROWS_AS(random_oversample(ds, plan, 1), UnreachableCellError);

  const auto other = dataset_from_cells({{{0}, 0, 3}, {{1}, 0, 4}}, 8);
  CHECK_THROWS_AS(mixfeat(other, plan_balancing(ds), {}), InputError);

  CHECK_THROWS_AS((MixFeatConfig{0.0, 1.0, 0, std::nullopt}.validate()), ConfigError);
  CHECK_THROWS_AS((MixFeatConfig{1.0, -2.0, 0, std::nullopt}.validate()), ConfigError);
}

TEST_CASE("augment dispatch") {
  const auto ds = two_attribute_train(9);
  CHECK(augment(ds, AugmentMethod::none, {}).dataset == ds);
  CHECK(augment(ds, AugmentMethod::mixfeat, {}).synthetic.size() == plan_balancing(ds).total_synthetic());
  CHECK(parse_augment_method("random_oversample") == AugmentMethod::random_oversample);
  CHECK_THROWS_AS(parse_augment_method("smote"), ConfigError);
}

}  // TEST_SUITE
