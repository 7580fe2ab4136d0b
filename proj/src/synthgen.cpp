#include "fairmix/synthgen.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "fairmix/error.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

namespace {

bool valid_group_key(const SynthSpec& spec, const std::string& key) {
  if (key == "default") return true;
  const auto colon = key.rfind(':');
  if (colon == std::string::npos) return false;
  const auto value = key.substr(colon + 1);
  if (value != "0" && value != "1") return false;
  const auto name = key.substr(0, colon);
  for (const auto& [a, p] : spec.attribute_props) {
    if (a == name) return true;
  }
  return false;
}

std::vector<std::string> matching_keys(const SynthSpec& spec, const std::vector<int>& attributes) {
  std::vector<std::string> keys;
  for (std::size_t a = 0; a < spec.attribute_props.size(); ++a) {
    keys.push_back(spec.attribute_props[a].first + ":" + std::to_string(attributes[a]));
  }
  return keys;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_subjects < 1) throw ConfigError("synth.n_subjects must be at least 1");
  if (sessions_per_subject < 1) throw ConfigError("synth.sessions must be at least 1");
  if (modality_dims.empty()) throw ConfigError("synth needs at least one modality");
  std::set<std::string> names;
  for (const auto& [name, dim] : modality_dims) {
    if (dim < 1) throw ConfigError("synth.modality." + name + " must be at least 1");
    if (!names.insert(name).second) throw ConfigError("duplicate synth modality '" + name + "'");
  }
  names.clear();
  for (const auto& [name, p] : attribute_props) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("synth.attribute." + name + " must lie in [0, 1]");
    if (!names.insert(name).second) throw ConfigError("duplicate synth attribute '" + name + "'");
  }
  for (const auto& [key, v] : base_rate) {
    if (!valid_group_key(*this, key)) throw ConfigError("synth.base_rate: unknown group '" + key + "'");
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("synth.base_rate." + key + " must lie in [0, 1]");
  }
  for (const auto& [key, v] : separation) {
    if (!valid_group_key(*this, key)) throw ConfigError("synth.separation: unknown group '" + key + "'");
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("synth.separation." + key + " must be >= 0");
  }
  if (!(noise_std > 0.0)) throw ConfigError("synth.noise_std must be positive");
  if (!(direction_overlap >= 0.0 && direction_overlap <= 1.0)) {
    throw ConfigError("synth.direction_overlap must lie in [0, 1]");
  }
}

double SynthSpec::subject_separation(const std::vector<int>& attributes) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& key : matching_keys(*this, attributes)) {
    if (auto it = separation.find(key); it != separation.end()) best = std::min(best, it->second);
  }
  if (std::isfinite(best)) return best;
  const auto it = separation.find("default");
  return it == separation.end() ? 0.0 : it->second;
}

double SynthSpec::subject_base_rate(const std::vector<int>& attributes) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& key : matching_keys(*this, attributes)) {
    if (auto it = base_rate.find(key); it != base_rate.end()) {
      sum += it->second;
      ++n;
    }
  }
  if (n > 0) return sum / n;
  const auto it = base_rate.find("default");
  return it == base_rate.end() ? 0.5 : it->second;
}

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n_attr = spec.attribute_props.size();
  const std::size_t n_mod = spec.modality_dims.size();

  // Class directions: one shared per modality, one specific per group.
  Rng dir_rng(derive_seed(spec.seed, "directions"));
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto unit = [&](Index d) {
    Vector v(d);
    do {
      for (Index i = 0; i < d; ++i) v(i) = normal(dir_rng);
    } while (v.norm() == 0.0);
    return Vector(v / v.norm());
  };
  const std::size_t n_groups = std::size_t{1} << n_attr;
  std::vector<std::vector<Vector>> directions(n_mod);
  for (std::size_t m = 0; m < n_mod; ++m) {
    const Index d = spec.modality_dims[m].second;
    const Vector shared = unit(d);
    for (std::size_t g = 0; g < n_groups; ++g) {
      const Vector specific = unit(d);
      Vector dir = spec.direction_overlap * shared +
                   std::sqrt(1.0 - spec.direction_overlap * spec.direction_overlap) * specific;
      if (dir.norm() == 0.0) dir = shared;
      directions[m].push_back(dir / dir.norm());
    }
  }

  Rng rng(derive_seed(spec.seed, "samples"));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t n_rows =
      static_cast<std::size_t>(spec.n_subjects) * static_cast<std::size_t>(spec.sessions_per_subject);

  std::vector<ModalityTable> tables(n_mod);
  for (std::size_t m = 0; m < n_mod; ++m) {
    const auto& [name, dim] = spec.modality_dims[m];
    tables[m].name = name;
    tables[m].samples.resize(static_cast<Index>(n_rows), dim);
    for (int j = 0; j < dim; ++j) {
      tables[m].columns.push_back({name + "_f" + std::to_string(j + 1),
                                   j < (dim + 1) / 2 ? FeatureLevel::high : FeatureLevel::low});
    }
  }

  std::vector<SampleMeta> meta;
  meta.reserve(n_rows);
  char buf[64];
  for (int s = 0; s < spec.n_subjects; ++s) {
    std::vector<int> attributes(n_attr);
    std::size_t group = 0;
    for (std::size_t a = 0; a < n_attr; ++a) {
      attributes[a] = uniform(rng) < spec.attribute_props[a].second ? 1 : 0;
      group = (group << 1) | static_cast<std::size_t>(attributes[a]);
    }
    const double sep = spec.subject_separation(attributes);
    const double rate = spec.subject_base_rate(attributes);
    std::snprintf(buf, sizeof(buf), "s%03d", s + 1);
    const std::string subject = buf;
    for (int w = 0; w < spec.sessions_per_subject; ++w) {
      const auto row = static_cast<Index>(meta.size());
      SampleMeta sm;
      sm.subject_id = subject;
      sm.sample_id = subject + "_w" + std::to_string(w + 1);
      sm.attributes = attributes;
      sm.label = uniform(rng) < rate ? 1 : 0;
      const double shift = (sm.label - 0.5) * sep;
      for (std::size_t m = 0; m < n_mod; ++m) {
        const auto& dir = directions[m][group];
        for (Index j = 0; j < dir.size(); ++j) {
          tables[m].samples(row, j) = spec.noise_std * (normal(rng) + shift * dir(j));
        }
      }
      meta.push_back(std::move(sm));
    }
  }

  std::vector<std::string> attribute_names;
  for (const auto& [name, p] : spec.attribute_props) attribute_names.push_back(name);
  return Dataset(std::move(tables), std::move(meta), std::move(attribute_names));
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> to_key_values(const SynthSpec& spec) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("synth.n_subjects", std::to_string(spec.n_subjects));
  kv.emplace_back("synth.sessions", std::to_string(spec.sessions_per_subject));
  for (const auto& [name, dim] : spec.modality_dims) {
    kv.emplace_back("synth.modality." + name, std::to_string(dim));
  }
  for (const auto& [name, p] : spec.attribute_props) {
    kv.emplace_back("synth.attribute." + name, format_double(p));
  }
  for (const auto& [key, v] : spec.base_rate) kv.emplace_back("synth.base_rate." + key, format_double(v));
  for (const auto& [key, v] : spec.separation) kv.emplace_back("synth.separation." + key, format_double(v));
  kv.emplace_back("synth.noise_std", format_double(spec.noise_std));
  kv.emplace_back("synth.direction_overlap", format_double(spec.direction_overlap));
  kv.emplace_back("synth.seed", std::to_string(spec.seed));
  return kv;
}

namespace {

double to_real(const KeyValueEntry& e) {
  double v = 0.0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(e.key + ": expected a number, got '" + e.value + "'");
  }
  return v;
}

long long to_integer(const KeyValueEntry& e) {
  long long v = 0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(e.key + ": expected an integer, got '" + e.value + "'");
  }
  return v;
}

}  // namespace

bool has_synth_entries(const std::vector<KeyValueEntry>& entries) {
  for (const auto& e : entries) {
    if (e.key.rfind("synth.", 0) == 0) return true;
  }
  return false;
}

SynthSpec synth_spec_from_entries(const std::vector<KeyValueEntry>& entries) {
  SynthSpec spec;
  bool modalities_given = false;
  bool attributes_given = false;
  for (const auto& e : entries) {
    if (e.key.rfind("synth.", 0) != 0) continue;
    const std::string key = e.key.substr(6);
    if (key == "n_subjects") {
      spec.n_subjects = static_cast<int>(to_integer(e));
    } else if (key == "sessions") {
      spec.sessions_per_subject = static_cast<int>(to_integer(e));
    } else if (key == "noise_std") {
      spec.noise_std = to_real(e);
    } else if (key == "direction_overlap") {
      spec.direction_overlap = to_real(e);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(to_integer(e));
    } else if (key.rfind("modality.", 0) == 0) {
      if (!modalities_given) spec.modality_dims.clear();
      modalities_given = true;
      spec.modality_dims.emplace_back(key.substr(9), static_cast<int>(to_integer(e)));
    } else if (key.rfind("attribute.", 0) == 0) {
      if (!attributes_given) spec.attribute_props.clear();
      attributes_given = true;
      spec.attribute_props.emplace_back(key.substr(10), to_real(e));
    } else if (key.rfind("base_rate.", 0) == 0) {
      spec.base_rate[key.substr(10)] = to_real(e);
    } else if (key.rfind("separation.", 0) == 0) {
      spec.separation[key.substr(11)] = to_real(e);
    } else {
      throw ConfigError("unknown key '" + e.key + "'");
    }
  }
  spec.validate();
  return spec;
}

}  // namespace fairmix
