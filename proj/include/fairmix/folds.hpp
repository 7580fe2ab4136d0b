#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fairmix/dataset.hpp"

namespace fairmix {

enum class CvMode { kfold, loso };

std::string_view to_string(CvMode m);
CvMode parse_cv_mode(std::string_view text);

struct CvSpec {
  CvMode mode = CvMode::kfold;
  int k = 5;
  bool grouped = true;     // a subject's rows never straddle train and test
  bool stratified = true;  // keep the label ratio similar across folds

  void validate() const;
};

struct Fold {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

// Deterministic given `seed`. LOSO yields one fold per subject in order of
// first appearance. k-fold folds that end up empty (fewer groups than k) are
// dropped.
std::vector<Fold> make_folds(const Dataset& dataset, const CvSpec& spec, std::uint64_t seed);

// Hex digest of the fold's test sample ids.
std::string fold_fingerprint(const Dataset& dataset, const Fold& fold);

}  // namespace fairmix
