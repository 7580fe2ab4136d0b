#include "fairmix/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fairmix/error.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

std::string_view to_string(AugmentMethod m) {
  switch (m) {
    case AugmentMethod::none: return "none";
    case AugmentMethod::random_oversample: return "random_oversample";
    case AugmentMethod::mixfeat: return "mixfeat";
  }
  return "?";
}

AugmentMethod parse_augment_method(std::string_view text) {
  if (text == "none") return AugmentMethod::none;
  if (text == "random_oversample") return AugmentMethod::random_oversample;
  if (text == "mixfeat") return AugmentMethod::mixfeat;
  throw ConfigError("unknown augmentation method '" + std::string(text) + "'");
}

std::string to_string(const CellKey& key) {
  std::string out = "(";
  for (int a : key.attributes) out += std::to_string(a) + ",";
  out += "y=" + std::to_string(key.label) + ")";
  return out;
}

std::size_t AugmentationPlan::total_synthetic() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.deficit();
  return n;
}

namespace {

CellKey key_of(const SampleMeta& s) { return CellKey{s.attributes, s.label}; }

std::map<CellKey, std::vector<std::size_t>> rows_by_cell(const Dataset& ds) {
  std::map<CellKey, std::vector<std::size_t>> cells;
  for (std::size_t r = 0; r < ds.n_samples(); ++r) cells[key_of(ds.meta()[r])].push_back(r);
  return cells;
}

// Source rows of every planned cell, checked against the plan.
std::vector<std::vector<std::size_t>> resolve_sources(const Dataset& train,
                                                      const AugmentationPlan& plan) {
  auto cells = rows_by_cell(train);
  std::vector<std::vector<std::size_t>> sources;
  sources.reserve(plan.cells.size());
  for (const auto& c : plan.cells) {
    if (c.target_count < c.current_count) {
      throw InputError("cell " + to_string(c.key) + " has target below its current count");
    }
    if (c.key.attributes.size() != train.attribute_names().size()) {
      throw InputError("cell " + to_string(c.key) + " does not match the declared attributes");
    }
    auto it = cells.find(c.key);
    std::vector<std::size_t> rows = it == cells.end() ? std::vector<std::size_t>{} : it->second;
    if (rows.empty() && c.deficit() > 0) {
      throw UnreachableCellError("cell " + to_string(c.key) +
                                 " needs synthetic rows but has no source rows");
    }
    if (rows.size() != c.current_count) {
      throw InputError("plan was not derived from this training split (cell " +
                       to_string(c.key) + ")");
    }
    sources.push_back(std::move(rows));
  }
  return sources;
}

class IdAllocator {
 public:
  IdAllocator(const Dataset& ds, std::string prefix) : prefix_(std::move(prefix)) {
    for (const auto& s : ds.meta()) {
      taken_.insert(s.sample_id);
      taken_.insert(s.subject_id);
    }
  }
  std::string next() {
    std::string id;
    do {
      id = prefix_ + std::to_string(counter_++);
    } while (!taken_.insert(id).second);
    return id;
  }

 private:
  std::string prefix_;
  std::set<std::string> taken_;
  std::size_t counter_ = 0;
};

// Appends `extra_rows` (one feature vector per modality each) and their meta.
Dataset append_rows(const Dataset& train, const std::vector<std::vector<Vector>>& extra_rows,
                    std::vector<SampleMeta> extra_meta) {
  std::vector<ModalityTable> mods = train.modalities();
  const auto n = static_cast<Index>(train.n_samples());
  const auto added = static_cast<Index>(extra_rows.size());
  for (std::size_t m = 0; m < mods.size(); ++m) {
    Matrix grown(n + added, mods[m].n_features());
    grown.topRows(n) = mods[m].samples;
    for (Index k = 0; k < added; ++k) {
      grown.row(n + k) = extra_rows[static_cast<std::size_t>(k)][m].transpose();
    }
    mods[m].samples = std::move(grown);
  }
  std::vector<SampleMeta> meta = train.meta();
  for (auto& s : extra_meta) meta.push_back(std::move(s));
  return Dataset(std::move(mods), std::move(meta), train.attribute_names());
}

}  // namespace

AugmentationPlan plan_balancing(const Dataset& train, AugmentMethod method) {
  AugmentationPlan plan;
  plan.method = method;
  const auto cells = rows_by_cell(train);
  std::size_t target = 0;
  for (const auto& [key, rows] : cells) target = std::max(target, rows.size());

  const std::size_t n_attr = train.attribute_names().size();
  const std::size_t n_keys = std::size_t{1} << (n_attr + 1);
  for (std::size_t code = 0; code < n_keys; ++code) {
    CellKey key;
    for (std::size_t a = 0; a < n_attr; ++a) {
      key.attributes.push_back(static_cast<int>((code >> (n_attr - a)) & 1U));
    }
    key.label = static_cast<int>(code & 1U);
    const auto it = cells.find(key);
    if (it == cells.end()) {
      plan.unreachable.push_back(std::move(key));
    } else {
      plan.cells.push_back({std::move(key), it->second.size(), target});
    }
  }
  return plan;
}

void MixFeatConfig::validate() const {
  if (!(beta_alpha > 0.0) || !std::isfinite(beta_alpha)) {
    throw ConfigError("augment.beta_alpha must be positive");
  }
  if (!(beta_beta > 0.0) || !std::isfinite(beta_beta)) {
    throw ConfigError("augment.beta_beta must be positive");
  }
  if (fixed_lambdas) {
    for (double l : *fixed_lambdas) {
      if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("fixed mixing weights must lie in [0, 1]");
    }
  }
}

double mix_value(double a, double b, double lambda) {
  if (lambda == 1.0) return a;
  if (lambda == 0.0) return b;
  const double v = lambda * a + (1.0 - lambda) * b;
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

AugmentedDataset random_oversample(const Dataset& train, const AugmentationPlan& plan,
                                   std::uint64_t seed) {
  const auto sources = resolve_sources(train, plan);
  IdAllocator ids(train, "ros-");
  std::vector<std::vector<Vector>> rows;
  std::vector<SampleMeta> meta;
  std::vector<SyntheticSample> provenance;
  const std::size_t n_mod = train.modalities().size();

  for (std::size_t c = 0; c < plan.cells.size(); ++c) {
    Rng rng(derive_seed(seed, "oversample-cell", c));
    const auto& src = sources[c];
    for (std::size_t k = 0; k < plan.cells[c].deficit(); ++k) {
      const std::size_t parent = src[uniform_index(rng, src.size())];
      std::vector<Vector> row;
      for (const auto& m : train.modalities()) {
        row.push_back(m.samples.row(static_cast<Index>(parent)).transpose());
      }
      SampleMeta s = train.meta()[parent];
      s.sample_id = ids.next();
      s.synthetic = true;
      provenance.push_back({train.n_samples() + rows.size(), parent, parent,
                            std::vector<double>(n_mod, 1.0)});
      rows.push_back(std::move(row));
      meta.push_back(std::move(s));
    }
  }
  if (rows.empty()) return {train, {}};
  return {append_rows(train, rows, std::move(meta)), std::move(provenance)};
}

AugmentedDataset mixfeat(const Dataset& train, const AugmentationPlan& plan,
                         const MixFeatConfig& config) {
  config.validate();
  const std::size_t n_mod = train.modalities().size();
  if (config.fixed_lambdas && config.fixed_lambdas->size() != n_mod) {
    throw ConfigError("expected one fixed mixing weight per modality");
  }
  const auto sources = resolve_sources(train, plan);
  IdAllocator ids(train, "mix-");
  std::vector<std::vector<Vector>> rows;
  std::vector<SampleMeta> meta;
  std::vector<SyntheticSample> provenance;

  for (std::size_t c = 0; c < plan.cells.size(); ++c) {
    Rng rng(derive_seed(config.seed, "mixfeat-cell", c));
    const auto& src = sources[c];
    for (std::size_t k = 0; k < plan.cells[c].deficit(); ++k) {
      std::size_t i = src[uniform_index(rng, src.size())];
      std::size_t j = i;
      if (src.size() > 1) {
        // Uniform over the other members of the cell.
        std::size_t pick = uniform_index(rng, src.size() - 1);
        const auto pos_i = static_cast<std::size_t>(
            std::find(src.begin(), src.end(), i) - src.begin());
        if (pick >= pos_i) ++pick;
        j = src[pick];
      }
      std::vector<double> lambdas(n_mod);
      for (std::size_t m = 0; m < n_mod; ++m) {
        lambdas[m] = config.fixed_lambdas ? (*config.fixed_lambdas)[m]
                                          : sample_beta(rng, config.beta_alpha, config.beta_beta);
      }
      std::vector<Vector> row;
      for (std::size_t m = 0; m < n_mod; ++m) {
        const auto& x = train.modalities()[m].samples;
        Vector v(x.cols());
        for (Index f = 0; f < x.cols(); ++f) {
          v(f) = mix_value(x(static_cast<Index>(i), f), x(static_cast<Index>(j), f), lambdas[m]);
        }
        row.push_back(std::move(v));
      }
      const auto& parent = train.meta()[i];
      SampleMeta s;
      s.sample_id = ids.next();
      s.subject_id = ids.next();
      s.label = parent.label;
      s.attributes = parent.attributes;
      s.synthetic = true;
      provenance.push_back({train.n_samples() + rows.size(), i, j, std::move(lambdas)});
      rows.push_back(std::move(row));
      meta.push_back(std::move(s));
    }
  }
  if (rows.empty()) return {train, {}};
  return {append_rows(train, rows, std::move(meta)), std::move(provenance)};
}

AugmentedDataset augment(const Dataset& train, AugmentMethod method, const MixFeatConfig& config) {
  switch (method) {
    case AugmentMethod::none: return {train, {}};
    case AugmentMethod::random_oversample:
      return random_oversample(train, plan_balancing(train, method), config.seed);
    case AugmentMethod::mixfeat: return mixfeat(train, plan_balancing(train, method), config);
  }
  return {train, {}};
}

}  // namespace fairmix
