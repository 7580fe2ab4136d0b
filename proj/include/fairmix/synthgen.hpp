#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fairmix/dataset.hpp"
#include "fairmix/kvfile.hpp"

namespace fairmix {

// Seeded generator of multimodal datasets with controllable group imbalance.
//
// Subjects carry the sensitive attributes; every session of a subject is one
// row with its own label. A row's features in each modality are
//   noise_std * (z + (label - 1/2) * separation * u)
// with z standard normal and u a unit class direction. The direction of a
// group (one attribute combination) is
//   direction_overlap * shared + sqrt(1 - overlap^2) * group-specific
// so an overlap below 1 makes the class signal partly group-specific.
//
// `separation` and `base_rate` are keyed by "default" or "<attribute>:<0|1>".
// A subject takes the smallest separation and the mean base rate among the
// keys that match it, falling back to "default".
struct SynthSpec {
  int n_subjects = 40;
  int sessions_per_subject = 4;
  std::vector<std::pair<std::string, int>> modality_dims{{"face", 6}, {"audio", 4}};
  std::vector<std::pair<std::string, double>> attribute_props{{"gender", 0.8}};
  std::map<std::string, double> base_rate{{"default", 0.5}};
  std::map<std::string, double> separation{{"default", 2.0}};
  double noise_std = 1.0;
  double direction_overlap = 1.0;
  std::uint64_t seed = 0;

  void validate() const;

  double subject_separation(const std::vector<int>& attributes) const;
  double subject_base_rate(const std::vector<int>& attributes) const;
};

Dataset generate(const SynthSpec& spec);

// `synth.*` keys of the configuration format.
std::vector<std::pair<std::string, std::string>> to_key_values(const SynthSpec& spec);
SynthSpec synth_spec_from_entries(const std::vector<KeyValueEntry>& entries);
bool has_synth_entries(const std::vector<KeyValueEntry>& entries);

}  // namespace fairmix
