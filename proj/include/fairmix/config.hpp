#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairmix/augment.hpp"
#include "fairmix/folds.hpp"
#include "fairmix/fusion.hpp"
#include "fairmix/kvfile.hpp"
#include "fairmix/preprocess.hpp"
#include "fairmix/synthgen.hpp"

namespace fairmix {

struct PipelineConfig {
  // Exactly one data source.
  std::optional<std::filesystem::path> manifest;
  std::optional<SynthSpec> synth;

  std::vector<std::string> modalities;  // empty: every modality, dataset order
  LevelFilter level = LevelFilter::all;
  DescriptorMask descriptors;

  bool pca = true;
  double pca_target_ratio = kDefaultPcaRatio;

  AugmentMethod augment = AugmentMethod::none;
  double beta_alpha = 1.0;
  double beta_beta = 1.0;
  std::optional<std::uint64_t> augment_seed;  // unset: derived from `seed`

  FusionSpec fusion;
  CvSpec cv;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "fairmix-out";

  void validate() const;

  std::uint64_t resolved_augment_seed() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Builds a configuration from parsed entries. Unknown keys, bad values and a
// missing `seed` raise ConfigError naming the key. Relative data paths resolve
// against `base_dir`.
PipelineConfig config_from_entries(const std::vector<KeyValueEntry>& entries,
                                   const std::filesystem::path& base_dir = {});

// Reads a key=value file, or the `config` object of a report.json, then
// applies `--set key=value` overrides and the FAIRMIX_SEED environment
// variable (when `env_seed` is set).
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {},
                           const std::optional<std::string>& env_seed = std::nullopt);

// Fully resolved configuration, one entry per key, in a fixed order.
KeyValues to_key_values(const PipelineConfig& config);
std::string config_fingerprint(const PipelineConfig& config);

// Returns a copy with a different augmentation arm.
PipelineConfig with_augment(PipelineConfig config, AugmentMethod method);

}  // namespace fairmix
