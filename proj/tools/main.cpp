#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "fairmix/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fairmix: bias audit and MixFeat debiasing for small multimodal datasets"};
  app.require_subcommand(1);

  fairmix::CommandOptions options;
  if (const char* seed = std::getenv("FAIRMIX_SEED")) options.env_seed = seed;

  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", options.config_path, "key=value config file or a report.json")
        ->required();
    sub->add_option("--set", options.overrides, "override a config key (key=value)")
        ->take_all();
  };

  auto* audit = app.add_subcommand("audit", "run the configured pipeline once and write reports");
  add_config(audit);
  auto* compare = app.add_subcommand("compare", "run the original, baseline and MixFeat arms on shared folds");
  add_config(compare);
  auto* validate = app.add_subcommand("validate", "check a config file without running it");
  add_config(validate);

  std::string spec_path;
  std::string out_dir;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset in manifest + CSV layout");
  synth->add_option("spec", spec_path, "file with synth.* keys")->required();
  synth->add_option("out_dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fairmix::kExitConfig;
  }

  if (*audit) return fairmix::cmd_audit(options, std::cout, std::cerr);
  if (*compare) return fairmix::cmd_compare(options, std::cout, std::cerr);
  if (*validate) return fairmix::cmd_validate(options, std::cout, std::cerr);
  if (*synth) return fairmix::cmd_synth(spec_path, out_dir, std::cout, std::cerr);
  return fairmix::kExitOther;
}
