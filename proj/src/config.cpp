#include "fairmix/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include <json.hpp>

#include "fairmix/error.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

namespace {

// Re-throws a ConfigError with the key in front of the message.
template <typename F>
auto keyed(const KeyValueEntry& e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& err) {
    throw ConfigError(e.key + ": " + err.what());
  }
}

double parse_real(const KeyValueEntry& e) {
  double v = 0.0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(e.key + ": expected a number, got '" + e.value + "'");
  }
  return v;
}

long long parse_int(const KeyValueEntry& e) {
  long long v = 0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(e.key + ": expected an integer, got '" + e.value + "'");
  }
  return v;
}

std::uint64_t parse_seed(const KeyValueEntry& e) {
  std::uint64_t v = 0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(e.key + ": expected a non-negative integer seed, got '" + e.value + "'");
  }
  return v;
}

bool parse_bool(const KeyValueEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  throw ConfigError(e.key + ": expected true or false, got '" + e.value + "'");
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

// Applies a `model.*` or `fusion.meta.*` sub-key; false when unknown.
bool apply_predictor_key(PredictorSpec& spec, const std::string& sub, const KeyValueEntry& e) {
  if (sub == "kind") {
    spec.kind = keyed(e, [&] { return parse_model_kind(e.value); });
  } else if (sub == "C") {
    spec.C = parse_real(e);
  } else if (sub == "gamma") {
    if (e.value == "scale") {
      spec.gamma.reset();
    } else {
      spec.gamma = parse_real(e);
    }
  } else if (sub == "svm_tolerance") {
    spec.svm_tolerance = parse_real(e);
  } else if (sub == "platt_folds") {
    spec.platt_folds = static_cast<int>(parse_int(e));
  } else if (sub == "hidden_units") {
    spec.hidden_units = static_cast<int>(parse_int(e));
  } else if (sub == "learning_rate") {
    spec.learning_rate = parse_real(e);
  } else if (sub == "epochs") {
    spec.epochs = static_cast<int>(parse_int(e));
  } else if (sub == "batch_size") {
    spec.batch_size = static_cast<int>(parse_int(e));
  } else if (sub == "patience") {
    spec.patience = static_cast<int>(parse_int(e));
  } else if (sub == "min_improvement") {
    spec.min_improvement = parse_real(e);
  } else if (sub == "l2") {
    spec.l2 = parse_real(e);
  } else if (sub == "class_weight") {
    if (e.value == "balanced") {
      spec.balanced_class_weight = true;
    } else if (e.value == "none") {
      spec.balanced_class_weight = false;
    } else {
      throw ConfigError(e.key + ": expected none or balanced, got '" + e.value + "'");
    }
  } else {
    return false;
  }
  return true;
}

void predictor_key_values(KeyValues& kv, const std::string& prefix, const PredictorSpec& s) {
  kv.emplace_back(prefix + "kind", std::string(to_string(s.kind)));
  kv.emplace_back(prefix + "C", format_double(s.C));
  kv.emplace_back(prefix + "gamma", s.gamma ? format_double(*s.gamma) : "scale");
  kv.emplace_back(prefix + "svm_tolerance", format_double(s.svm_tolerance));
  kv.emplace_back(prefix + "platt_folds", std::to_string(s.platt_folds));
  kv.emplace_back(prefix + "hidden_units", std::to_string(s.hidden_units));
  kv.emplace_back(prefix + "learning_rate", format_double(s.learning_rate));
  kv.emplace_back(prefix + "epochs", std::to_string(s.epochs));
  kv.emplace_back(prefix + "batch_size", std::to_string(s.batch_size));
  kv.emplace_back(prefix + "patience", std::to_string(s.patience));
  kv.emplace_back(prefix + "min_improvement", format_double(s.min_improvement));
  kv.emplace_back(prefix + "l2", format_double(s.l2));
  kv.emplace_back(prefix + "class_weight", s.balanced_class_weight ? "balanced" : "none");
}

std::vector<KeyValueEntry> entries_from_report(const std::filesystem::path& path) {
  // Ordered, so key order (and with it modality order) survives the round trip.
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": not valid JSON (" + e.what() + ")");
  }
  if (!doc.is_object() || !doc.contains("config") || !doc["config"].is_object()) {
    throw ConfigError(path.string() + ": no embedded 'config' object");
  }
  std::vector<KeyValueEntry> entries;
  for (const auto& [key, value] : doc["config"].items()) {
    if (!value.is_string()) throw ConfigError(path.string() + ": config value of '" + key + "' is not a string");
    entries.push_back({key, value.get<std::string>(), 0});
  }
  return entries;
}

}  // namespace

void PipelineConfig::validate() const {
  if (manifest.has_value() == synth.has_value()) {
    throw ConfigError("exactly one of data.manifest or synth.* must be given");
  }
  if (synth) synth->validate();
  if (!(pca_target_ratio > 0.0 && pca_target_ratio <= 1.0)) {
    throw ConfigError("pca.target_ratio must lie in (0, 1]");
  }
  MixFeatConfig{beta_alpha, beta_beta, 0, std::nullopt}.validate();
  fusion.validate();
  cv.validate();
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

std::uint64_t PipelineConfig::resolved_augment_seed() const {
  return augment_seed ? *augment_seed : derive_seed(seed, "augment");
}

PipelineConfig config_from_entries(const std::vector<KeyValueEntry>& entries,
                                   const std::filesystem::path& base_dir) {
  PipelineConfig c;
  bool seed_given = false;
  std::vector<KeyValueEntry> synth_entries;

  for (const auto& e : entries) {
    const std::string& k = e.key;
    if (k.rfind("synth.", 0) == 0) {
      synth_entries.push_back(e);
    } else if (k == "data.manifest") {
      std::filesystem::path p = e.value;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.manifest = p.lexically_normal();
    } else if (k == "pipeline.modalities") {
      c.modalities.clear();
      if (e.value != "all" && !e.value.empty()) {
        for (const auto& m : split(e.value, ',')) {
          const auto name = trim(m);
          if (name.empty()) throw ConfigError(k + ": empty modality name");
          c.modalities.push_back(name);
        }
      }
    } else if (k == "pipeline.level") {
      c.level = keyed(e, [&] { return parse_level_filter(e.value); });
    } else if (k == "pipeline.descriptors") {
      c.descriptors = keyed(e, [&] { return DescriptorMask::parse(e.value); });
    } else if (k == "pca.enabled") {
      c.pca = parse_bool(e);
    } else if (k == "pca.target_ratio") {
      c.pca_target_ratio = parse_real(e);
    } else if (k == "augment.method") {
      c.augment = keyed(e, [&] { return parse_augment_method(e.value); });
    } else if (k == "augment.beta_alpha") {
      c.beta_alpha = parse_real(e);
    } else if (k == "augment.beta_beta") {
      c.beta_beta = parse_real(e);
    } else if (k == "augment.seed") {
      c.augment_seed = parse_seed(e);
    } else if (k.rfind("model.", 0) == 0) {
      if (!apply_predictor_key(c.fusion.base, k.substr(6), e)) {
        throw ConfigError("unknown key '" + k + "'");
      }
    } else if (k == "fusion.strategy") {
      c.fusion.strategy = keyed(e, [&] { return parse_fusion_strategy(e.value); });
    } else if (k == "fusion.stacking_folds") {
      c.fusion.stacking_folds = static_cast<int>(parse_int(e));
    } else if (k.rfind("fusion.meta.", 0) == 0) {
      if (!apply_predictor_key(c.fusion.meta, k.substr(12), e)) {
        throw ConfigError("unknown key '" + k + "'");
      }
    } else if (k == "cv.mode") {
      c.cv.mode = keyed(e, [&] { return parse_cv_mode(e.value); });
    } else if (k == "cv.k") {
      c.cv.k = static_cast<int>(parse_int(e));
    } else if (k == "cv.grouped") {
      c.cv.grouped = parse_bool(e);
    } else if (k == "cv.stratified") {
      c.cv.stratified = parse_bool(e);
    } else if (k == "seed") {
      c.seed = parse_seed(e);
      seed_given = true;
    } else if (k == "output.dir") {
      if (e.value.empty()) throw ConfigError(k + ": must not be empty");
      c.output_dir = e.value;
    } else {
      throw ConfigError("unknown key '" + k + "'");
    }
  }
  if (!seed_given) throw ConfigError("missing required key 'seed'");
  if (!synth_entries.empty()) c.synth = synth_spec_from_entries(synth_entries);

  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides,
                           const std::optional<std::string>& env_seed) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file '" + path.string() + "' not found");
  std::vector<KeyValueEntry> entries =
      path.extension() == ".json" ? entries_from_report(path) : read_key_value_file(path);

  const auto set = [&](const std::string& key, const std::string& value, int line) {
    for (auto& e : entries) {
      if (e.key == key) {
        e.value = value;
        return;
      }
    }
    entries.push_back({key, value, line});
  };
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
    const auto key = trim(std::string_view(o).substr(0, eq));
    if (key.empty()) throw ConfigError("--set expects key=value, got '" + o + "'");
    set(key, trim(std::string_view(o).substr(eq + 1)), 0);
  }
  if (env_seed) set("seed", trim(*env_seed), 0);

  // Paths inside a report are already resolved.
  const auto base = path.extension() == ".json" ? std::filesystem::path{}
                                                  : std::filesystem::absolute(path).parent_path();
  return config_from_entries(entries, base);
}

KeyValues to_key_values(const PipelineConfig& c) {
  KeyValues kv;
  if (c.manifest) kv.emplace_back("data.manifest", c.manifest->generic_string());
  if (c.synth) {
    for (auto& p : to_key_values(*c.synth)) kv.push_back(std::move(p));
  }
  std::string mods;
  for (std::size_t i = 0; i < c.modalities.size(); ++i) mods += (i ? "," : "") + c.modalities[i];
  kv.emplace_back("pipeline.modalities", c.modalities.empty() ? "all" : mods);
  kv.emplace_back("pipeline.level", std::string(to_string(c.level)));
  kv.emplace_back("pipeline.descriptors", c.descriptors.to_string());
  kv.emplace_back("pca.enabled", bool_text(c.pca));
  kv.emplace_back("pca.target_ratio", format_double(c.pca_target_ratio));
  kv.emplace_back("augment.method", std::string(to_string(c.augment)));
  kv.emplace_back("augment.beta_alpha", format_double(c.beta_alpha));
  kv.emplace_back("augment.beta_beta", format_double(c.beta_beta));
  if (c.augment_seed) kv.emplace_back("augment.seed", std::to_string(*c.augment_seed));
  predictor_key_values(kv, "model.", c.fusion.base);
  kv.emplace_back("fusion.strategy", std::string(to_string(c.fusion.strategy)));
  kv.emplace_back("fusion.stacking_folds", std::to_string(c.fusion.stacking_folds));
  predictor_key_values(kv, "fusion.meta.", c.fusion.meta);
  kv.emplace_back("cv.mode", std::string(to_string(c.cv.mode)));
  kv.emplace_back("cv.k", std::to_string(c.cv.k));
  kv.emplace_back("cv.grouped", bool_text(c.cv.grouped));
  kv.emplace_back("cv.stratified", bool_text(c.cv.stratified));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("output.dir", c.output_dir.generic_string());
  return kv;
}

std::string config_fingerprint(const PipelineConfig& config) {
  std::uint64_t h = fnv1a("config");
  for (const auto& [k, v] : to_key_values(config)) {
    if (k == "output.dir") continue;
    h = fnv1a(k, h);
    h = fnv1a("=", h);
    h = fnv1a(v, h);
    h = fnv1a("\n", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineConfig with_augment(PipelineConfig config, AugmentMethod method) {
  config.augment = method;
  return config;
}

}  // namespace fairmix
