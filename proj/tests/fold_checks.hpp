#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairmix/folds.hpp"

namespace fairmix::testing {

// Empty when the folds are clean; otherwise a description of the first
// violation. Checks that test sets partition the rows, each train set is the
// complement of its test set, and (when `grouped`) no subject straddles them.
// For LOSO, every test set must be exactly one subject's rows.
inline std::string fold_violation(const Dataset& ds, const std::vector<Fold>& folds, bool grouped,
                                  bool loso) {
  const std::size_t n = ds.n_samples();
  std::vector<int> seen(n, 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    const std::string tag = "fold " + std::to_string(f) + ": ";
    if (fold.test.empty()) return tag + "empty test set";
    std::vector<char> in_test(n, 0);
    for (auto r : fold.test) {
      if (r >= n) return tag + "row out of range";
      if (in_test[r]) return tag + "duplicate test row";
      in_test[r] = 1;
      ++seen[r];
    }
    if (fold.train.size() + fold.test.size() != n) return tag + "train and test do not cover the rows";
    for (auto r : fold.train) {
      if (r >= n || in_test[r]) return tag + "row in both train and test";
    }
    std::set<std::string> test_subjects;
    for (auto r : fold.test) test_subjects.insert(ds.meta()[r].subject_id);
    if (grouped) {
      for (auto r : fold.train) {
        if (test_subjects.count(ds.meta()[r].subject_id)) {
          return tag + "subject " + ds.meta()[r].subject_id + " in train and test";
        }
      }
    }
    if (loso && test_subjects.size() != 1) return tag + "LOSO test set spans several subjects";
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (seen[r] != 1) return "row " + std::to_string(r) + " tested " + std::to_string(seen[r]) + " times";
  }
  if (loso) {
    std::set<std::string> subjects;
    for (const auto& m : ds.meta()) subjects.insert(m.subject_id);
    if (folds.size() != subjects.size()) return "LOSO fold count differs from subject count";
  }
  return {};
}

}  // namespace fairmix::testing
