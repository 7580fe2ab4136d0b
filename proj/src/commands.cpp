#include "fairmix/commands.hpp"

#include <functional>

#include "fairmix/config.hpp"
#include "fairmix/error.hpp"
#include "fairmix/experiment.hpp"
#include "fairmix/kvfile.hpp"
#include "fairmix/report.hpp"
#include "fairmix/synthgen.hpp"

namespace fairmix {

int exit_code_for(const std::exception& e) {
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    switch (fe->category()) {
      case Error::Category::config: return kExitConfig;
      case Error::Category::data: return kExitData;
      case Error::Category::experiment: return kExitExperiment;
    }
  }
  return kExitOther;
}

namespace {

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

std::string arm_title(AugmentMethod m) {
  switch (m) {
    case AugmentMethod::none: return "Original";
    case AugmentMethod::random_oversample: return "Baseline";
    case AugmentMethod::mixfeat: return "Proposed";
  }
  return "";
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

void write_outputs(const PipelineConfig& config, const Json& doc, const std::vector<NamedReport>& arms,
                   std::ostream& out) {
  std::filesystem::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "report.json", doc.dump(2) + "\n");
  std::string md = "# fairmix " + doc["command"].get<std::string>() + "\n\n";
  md += "seed " + std::to_string(config.seed) + ", config " + config_fingerprint(config) + "\n\n";
  md += markdown_table(arms);
  write_file_atomic(config.output_dir / "report.md", md);
  write_file_atomic(config.output_dir / "predictions.csv", predictions_csv(arms));
  out << markdown_table(arms);
  out << "wrote " << (config.output_dir / "report.json").string() << "\n";
}

}  // namespace

int cmd_audit(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(options.config_path, options.overrides, options.env_seed);
    const Dataset dataset = load_config_dataset(config);
    const auto report = run_experiment(config, dataset);
    print_warnings(err, report.warnings);
    const std::vector<NamedReport> arms{{arm_title(config.augment), &report}};
    write_outputs(config, audit_document(config, dataset, report), arms, out);
  });
}

int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(options.config_path, options.overrides, options.env_seed);
    const Dataset dataset = load_config_dataset(config);
    std::vector<EvaluationReport> reports;
    for (auto m : {AugmentMethod::none, AugmentMethod::random_oversample, AugmentMethod::mixfeat}) {
      reports.push_back(run_experiment(with_augment(config, m), dataset));
    }
    print_warnings(err, reports.front().warnings);
    std::vector<NamedReport> arms;
    for (const auto& r : reports) arms.emplace_back(arm_title(r.augment), &r);
    std::vector<NamedReport> json_arms{
        {"original", &reports[0]}, {"baseline", &reports[1]}, {"proposed", &reports[2]}};
    write_outputs(config, compare_document(config, dataset, json_arms), arms, out);
  });
}

int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(options.config_path, options.overrides, options.env_seed);
    if (config.manifest && !std::filesystem::exists(*config.manifest)) {
      throw InputError("data.manifest: '" + config.manifest->string() + "' does not exist");
    }
    out << "config ok (" << config_fingerprint(config) << ")\n";
  });
}

int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto entries = read_key_value_file(spec_path);
    if (!has_synth_entries(entries)) throw ConfigError(spec_path.string() + ": no synth.* keys");
    const auto spec = synth_spec_from_entries(entries);
    const Dataset dataset = generate(spec);
    print_warnings(err, dataset.warnings());
    const auto manifest = write_dataset(dataset, out_dir);
    std::string text;
    for (const auto& [k, v] : to_key_values(spec)) text += k + "=" + v + "\n";
    write_file_atomic(out_dir / "synth_spec.txt", text);
    out << "wrote " << dataset.n_samples() << " samples to " << manifest.string() << "\n";
  });
}

}  // namespace fairmix
