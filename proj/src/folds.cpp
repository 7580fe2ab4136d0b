#include "fairmix/folds.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "fairmix/error.hpp"
#include "fairmix/models.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

std::string_view to_string(CvMode m) { return m == CvMode::kfold ? "kfold" : "loso"; }

CvMode parse_cv_mode(std::string_view text) {
  if (text == "kfold") return CvMode::kfold;
  if (text == "loso") return CvMode::loso;
  throw ConfigError("cv.mode must be kfold or loso, got '" + std::string(text) + "'");
}

void CvSpec::validate() const {
  if (mode == CvMode::kfold && k < 2) throw ConfigError("cv.k must be at least 2");
}

namespace {

struct Group {
  std::vector<std::size_t> rows;
  std::array<std::size_t, 2> label_counts{0, 0};
};

std::vector<Group> groups_by_subject(const Dataset& ds) {
  std::map<std::string, std::size_t> index;
  std::vector<Group> groups;
  for (std::size_t r = 0; r < ds.n_samples(); ++r) {
    const auto& s = ds.meta()[r];
    auto [it, inserted] = index.emplace(s.subject_id, groups.size());
    if (inserted) groups.emplace_back();
    auto& g = groups[it->second];
    g.rows.push_back(r);
    ++g.label_counts[static_cast<std::size_t>(s.label)];
  }
  return groups;
}

std::vector<Fold> folds_from_assignment(std::size_t n, const std::vector<int>& fold_of, int k) {
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < n; ++r) {
    for (int f = 0; f < k; ++f) {
      (f == fold_of[r] ? folds[static_cast<std::size_t>(f)].test
                       : folds[static_cast<std::size_t>(f)].train)
          .push_back(r);
    }
  }
  std::erase_if(folds, [](const Fold& f) { return f.test.empty(); });
  return folds;
}

// Greedy placement of whole groups: largest first, each into the fold that
// keeps the per-class fold shares most even (or the smallest fold when not
// stratified).
std::vector<int> grouped_assignment(const Dataset& ds, int k, bool stratified, std::uint64_t seed) {
  auto groups = groups_by_subject(ds);
  Rng rng(seed);
  std::shuffle(groups.begin(), groups.end(), rng);
  std::stable_sort(groups.begin(), groups.end(),
                   [](const Group& a, const Group& b) { return a.rows.size() > b.rows.size(); });

  std::array<double, 2> totals{0.0, 0.0};
  for (const auto& g : groups) {
    totals[0] += static_cast<double>(g.label_counts[0]);
    totals[1] += static_cast<double>(g.label_counts[1]);
  }
  const auto uk = static_cast<std::size_t>(k);
  std::vector<std::array<double, 2>> counts(uk, {0.0, 0.0});
  std::vector<std::size_t> sizes(uk, 0);
  std::vector<int> fold_of(ds.n_samples(), 0);

  for (const auto& g : groups) {
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < uk; ++f) {
      double cost = 0.0;
      if (stratified) {
        for (std::size_t c = 0; c < 2; ++c) {
          if (totals[c] == 0.0) continue;
          double mean = 0.0;
          std::vector<double> share(uk);
          for (std::size_t h = 0; h < uk; ++h) {
            share[h] = (counts[h][c] + (h == f ? static_cast<double>(g.label_counts[c]) : 0.0)) / totals[c];
            mean += share[h];
          }
          mean /= static_cast<double>(uk);
          for (double s : share) cost += (s - mean) * (s - mean);
        }
      } else {
        cost = static_cast<double>(sizes[f]);
      }
      if (cost < best_cost - 1e-15 ||
          (std::abs(cost - best_cost) <= 1e-15 && sizes[f] < sizes[best])) {
        best_cost = cost;
        best = f;
      }
    }
    for (auto r : g.rows) fold_of[r] = static_cast<int>(best);
    counts[best][0] += static_cast<double>(g.label_counts[0]);
    counts[best][1] += static_cast<double>(g.label_counts[1]);
    sizes[best] += g.rows.size();
  }
  return fold_of;
}

}  // namespace

std::vector<Fold> make_folds(const Dataset& ds, const CvSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = ds.n_samples();
  if (spec.mode == CvMode::loso) {
    const auto groups = groups_by_subject(ds);
    std::vector<int> fold_of(n, 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (auto r : groups[g].rows) fold_of[r] = static_cast<int>(g);
    }
    return folds_from_assignment(n, fold_of, static_cast<int>(groups.size()));
  }

  std::vector<int> fold_of;
  if (spec.grouped) {
    fold_of = grouped_assignment(ds, spec.k, spec.stratified, seed);
  } else if (spec.stratified) {
    fold_of = stratified_fold_assignment(ds.labels(), spec.k, seed);
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    fold_of.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      fold_of[order[p]] = static_cast<int>(p % static_cast<std::size_t>(spec.k));
    }
  }
  return folds_from_assignment(n, fold_of, spec.k);
}

std::string fold_fingerprint(const Dataset& ds, const Fold& fold) {
  std::uint64_t h = fnv1a("fold");
  for (auto r : fold.test) {
    h = fnv1a(ds.meta()[r].sample_id, h);
    h = fnv1a("\n", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fairmix
