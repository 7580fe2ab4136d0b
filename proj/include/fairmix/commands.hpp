#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fairmix {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitExperiment = 4,
};

struct CommandOptions {
  std::filesystem::path config_path;
  std::vector<std::string> overrides;  // "key=value"
  std::optional<std::string> env_seed;  // value of FAIRMIX_SEED, if set
};

int exit_code_for(const std::exception& e);

// Each command reports diagnostics on `err` and returns an exit code; no
// exception escapes.
int cmd_audit(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err);
// Reads the `synth.*` keys of `spec_path` and writes the dataset under `out_dir`.
int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err);

}  // namespace fairmix
