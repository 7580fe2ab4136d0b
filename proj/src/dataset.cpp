#include "fairmix/dataset.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <cstring>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fairmix/error.hpp"
#include "fairmix/kvfile.hpp"

namespace fairmix {

namespace fs = std::filesystem;

std::string_view to_string(FeatureLevel level) {
  return level == FeatureLevel::high ? "high" : "low";
}

FeatureLevel parse_feature_level(std::string_view text) {
  if (text == "high") return FeatureLevel::high;
  if (text == "low") return FeatureLevel::low;
  throw SchemaError("feature level must be 'high' or 'low', got '" + std::string(text) + "'");
}

void ModalityTable::validate() const {
  if (static_cast<std::size_t>(samples.cols()) != columns.size()) {
    throw SchemaError("modality '" + name + "': " + std::to_string(samples.cols()) +
                      " value columns but " + std::to_string(columns.size()) +
                      " column descriptors");
  }
  if (samples.rows() < 1) throw SchemaError("modality '" + name + "' has no rows");
  for (Index c = 0; c < samples.cols(); ++c) {
    for (Index r = 0; r < samples.rows(); ++r) {
      const double v = samples(r, c);
      if (std::isinf(v)) {
        throw SchemaError("modality '" + name + "': infinite value at row " +
                          std::to_string(r) + ", column '" + columns[c].name + "'");
      }
    }
  }
}

ModalityTable ModalityTable::select_rows(std::span<const std::size_t> rows) const {
  ModalityTable out{name, Matrix(static_cast<Index>(rows.size()), samples.cols()), columns};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.samples.row(static_cast<Index>(i)) = samples.row(static_cast<Index>(rows[i]));
  }
  return out;
}

ModalityTable ModalityTable::select_columns(std::span<const Index> cols) const {
  ModalityTable out{name, Matrix(samples.rows(), static_cast<Index>(cols.size())), {}};
  out.columns.reserve(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.samples.col(static_cast<Index>(j)) = samples.col(cols[j]);
    out.columns.push_back(columns[static_cast<std::size_t>(cols[j])]);
  }
  return out;
}

Dataset::Dataset(std::vector<ModalityTable> modalities, std::vector<SampleMeta> meta,
                 std::vector<std::string> attribute_names)
    : modalities_(std::move(modalities)),
      meta_(std::move(meta)),
      attribute_names_(std::move(attribute_names)) {
  if (meta_.empty()) throw SchemaError("dataset has no samples");
  if (modalities_.empty()) throw SchemaError("dataset has no modalities");

  std::set<std::string> names;
  for (const auto& m : modalities_) {
    m.validate();
    if (!names.insert(m.name).second) throw SchemaError("duplicate modality '" + m.name + "'");
    if (static_cast<std::size_t>(m.n_samples()) != meta_.size()) {
      throw AlignmentError("modality '" + m.name + "' has " + std::to_string(m.n_samples()) +
                           " rows, metadata has " + std::to_string(meta_.size()));
    }
  }
  std::set<std::string> attrs(attribute_names_.begin(), attribute_names_.end());
  if (attrs.size() != attribute_names_.size()) throw SchemaError("duplicate attribute name");

  std::set<std::string> ids;
  for (const auto& s : meta_) {
    if (!ids.insert(s.sample_id).second) {
      throw SchemaError("duplicate sample_id '" + s.sample_id + "'");
    }
    if (s.label != 0 && s.label != 1) {
      throw SchemaError("sample '" + s.sample_id + "': label must be 0 or 1");
    }
    if (s.attributes.size() != attribute_names_.size()) {
      throw SchemaError("sample '" + s.sample_id + "' lacks a value for some attribute");
    }
    for (int a : s.attributes) {
      if (a != 0 && a != 1) {
        throw SchemaError("sample '" + s.sample_id + "': attribute values must be 0 or 1");
      }
    }
  }

  const auto check_both = [&](const std::string& what, auto&& value_of) {
    bool has0 = false;
    bool has1 = false;
    for (const auto& s : meta_) (value_of(s) == 0 ? has0 : has1) = true;
    if (!(has0 && has1)) {
      warnings_.push_back("degenerate group: " + what + " only takes value " +
                          (has0 ? "0" : "1"));
    }
  };
  check_both("label", [](const SampleMeta& s) { return s.label; });
  for (std::size_t a = 0; a < attribute_names_.size(); ++a) {
    check_both("attribute '" + attribute_names_[a] + "'",
               [a](const SampleMeta& s) { return s.attributes[a]; });
  }
}

const ModalityTable& Dataset::modality(std::string_view name) const {
  for (const auto& m : modalities_) {
    if (m.name == name) return m;
  }
  throw SchemaError("unknown modality '" + std::string(name) + "'");
}

std::size_t Dataset::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attribute_names_.size(); ++i) {
    if (attribute_names_[i] == name) return i;
  }
  throw SchemaError("unknown attribute '" + std::string(name) + "'");
}

Labels Dataset::labels() const {
  Labels y(static_cast<Index>(meta_.size()));
  for (std::size_t i = 0; i < meta_.size(); ++i) y(static_cast<Index>(i)) = meta_[i].label;
  return y;
}

std::vector<int> Dataset::attribute_values(std::string_view name) const {
  const auto a = attribute_index(name);
  std::vector<int> out;
  out.reserve(meta_.size());
  for (const auto& s : meta_) out.push_back(s.attributes[a]);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<ModalityTable> mods;
  mods.reserve(modalities_.size());
  for (const auto& m : modalities_) mods.push_back(m.select_rows(rows));
  std::vector<SampleMeta> meta;
  meta.reserve(rows.size());
  for (auto r : rows) meta.push_back(meta_.at(r));
  return Dataset(std::move(mods), std::move(meta), attribute_names_);
}

Dataset Dataset::with_modalities(std::vector<ModalityTable> modalities) const {
  return Dataset(std::move(modalities), meta_, attribute_names_);
}

namespace {

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 ||
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

bool Dataset::operator==(const Dataset& other) const {
  if (meta_ != other.meta_ || attribute_names_ != other.attribute_names_) return false;
  if (modalities_.size() != other.modalities_.size()) return false;
  for (std::size_t i = 0; i < modalities_.size(); ++i) {
    const auto& a = modalities_[i];
    const auto& b = other.modalities_[i];
    if (a.name != b.name || a.columns != b.columns || !bitwise_equal(a.samples, b.samples)) {
      return false;
    }
  }
  return true;
}

int binarize_panas(double pa_score, double threshold) {
  if (!std::isfinite(pa_score)) throw InputError("PANAS score must be finite");
  if (!std::isfinite(threshold)) throw InputError("PANAS threshold must be finite");
  return pa_score > threshold ? 1 : 0;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// CSV reading

namespace {

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

CsvTable read_csv(const fs::path& path) {
  CsvTable table;
  table.source = path.string();
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    for (auto& f : fields) f = unquote(trim(f));
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(table.source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw ParseError(table.source + ": missing header row");
  return table;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_feature_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  const auto& cell = t.rows[row][col];
  if (is_missing_token(cell)) return std::numeric_limits<double>::quiet_NaN();
  const auto v = parse_number(cell);
  if (!v || !std::isfinite(*v)) {
    throw ParseError(t.source + ":" + std::to_string(t.line_numbers[row]) + ": non-numeric value '" +
                     cell + "' in column '" + t.header[col] + "'");
  }
  return *v;
}

int parse_binary_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  const auto& cell = t.rows[row][col];
  const auto v = parse_number(cell);
  if (!v || (*v != 0.0 && *v != 1.0)) {
    throw SchemaError(t.source + ":" + std::to_string(t.line_numbers[row]) + ": column '" +
                      t.header[col] + "' must be 0 or 1, got '" + cell + "'");
  }
  return static_cast<int>(*v);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path) {
  std::vector<KeyValueEntry> entries;
  try {
    entries = read_key_value_file(manifest_path);
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
  const fs::path base = manifest_path.parent_path();

  std::vector<std::pair<std::string, fs::path>> modality_files;
  std::map<std::string, fs::path> level_files;
  std::optional<fs::path> metadata_file;
  double threshold = kDefaultPanasThreshold;

  for (const auto& e : entries) {
    if (e.key.rfind("modality.", 0) == 0) {
      modality_files.emplace_back(e.key.substr(9), resolve(base, e.value));
    } else if (e.key.rfind("levels.", 0) == 0) {
      level_files[e.key.substr(7)] = resolve(base, e.value);
    } else if (e.key == "metadata") {
      metadata_file = resolve(base, e.value);
    } else if (e.key == "panas_threshold") {
      const auto v = parse_number(e.value);
      if (!v || !std::isfinite(*v)) {
        throw SchemaError("manifest: panas_threshold must be a finite number");
      }
      threshold = *v;
    } else {
      throw SchemaError("manifest: unknown key '" + e.key + "'");
    }
  }
  if (!metadata_file) throw SchemaError("manifest: missing 'metadata' entry");
  if (modality_files.empty()) throw SchemaError("manifest: no 'modality.<name>' entries");
  for (const auto& [name, path] : level_files) {
    bool known = false;
    for (const auto& mf : modality_files) known = known || mf.first == name;
    if (!known) throw SchemaError("manifest: levels for unknown modality '" + name + "'");
  }

  // Metadata defines row order.
  const CsvTable meta_csv = read_csv(*metadata_file);
  const auto& h = meta_csv.header;
  if (h.size() < 3 || h[0] != "sample_id" || h[1] != "subject_id" ||
      (h[2] != "pa_score" && h[2] != "label")) {
    throw SchemaError(meta_csv.source +
                      ": header must start with sample_id,subject_id,(pa_score|label)");
  }
  const bool has_score = h[2] == "pa_score";
  std::vector<std::string> attribute_names(h.begin() + 3, h.end());

  std::vector<SampleMeta> meta;
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < meta_csv.rows.size(); ++r) {
    const auto& row = meta_csv.rows[r];
    SampleMeta s;
    s.sample_id = row[0];
    s.subject_id = row[1];
    if (s.sample_id.empty() || s.subject_id.empty()) {
      throw SchemaError(meta_csv.source + ":" + std::to_string(meta_csv.line_numbers[r]) +
                        ": empty sample_id or subject_id");
    }
    if (has_score) {
      const auto score = parse_number(row[2]);
      if (!score || !std::isfinite(*score)) {
        throw SchemaError(meta_csv.source + ":" + std::to_string(meta_csv.line_numbers[r]) +
                          ": pa_score must be a finite number, got '" + row[2] + "'");
      }
      s.label = binarize_panas(*score, threshold);
    } else {
      s.label = parse_binary_cell(meta_csv, r, 2);
    }
    for (std::size_t c = 3; c < row.size(); ++c) {
      s.attributes.push_back(parse_binary_cell(meta_csv, r, c));
    }
    if (!row_of.emplace(s.sample_id, r).second) {
      throw SchemaError(meta_csv.source + ": duplicate sample_id '" + s.sample_id + "'");
    }
    meta.push_back(std::move(s));
  }
  if (meta.empty()) throw SchemaError(meta_csv.source + ": no samples");

  std::vector<ModalityTable> modalities;
  for (const auto& [name, path] : modality_files) {
    const CsvTable csv = read_csv(path);
    if (csv.header.empty() || csv.header[0] != "sample_id") {
      throw SchemaError(csv.source + ": first column must be sample_id");
    }
    const std::size_t n_features = csv.header.size() - 1;
    if (n_features == 0) throw SchemaError(csv.source + ": no feature columns");

    std::map<std::string, FeatureLevel> levels;
    if (auto it = level_files.find(name); it != level_files.end()) {
      const CsvTable lv = read_csv(it->second);
      if (lv.header.size() != 2 || lv.header[0] != "feature_name" || lv.header[1] != "level") {
        throw SchemaError(lv.source + ": header must be feature_name,level");
      }
      for (const auto& row : lv.rows) levels[row[0]] = parse_feature_level(row[1]);
    }

    ModalityTable table;
    table.name = name;
    for (std::size_t c = 1; c < csv.header.size(); ++c) {
      const auto it = levels.find(csv.header[c]);
      table.columns.push_back(
          {csv.header[c], it == levels.end() ? FeatureLevel::low : it->second});
    }
    table.samples = Matrix::Constant(static_cast<Index>(meta.size()),
                                     static_cast<Index>(n_features),
                                     std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> filled(meta.size(), false);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const auto& id = csv.rows[r][0];
      const auto it = row_of.find(id);
      if (it == row_of.end()) {
        throw AlignmentError(csv.source + ": sample_id '" + id + "' not present in metadata");
      }
      if (filled[it->second]) {
        throw SchemaError(csv.source + ": duplicate sample_id '" + id + "'");
      }
      filled[it->second] = true;
      for (std::size_t c = 0; c < n_features; ++c) {
        table.samples(static_cast<Index>(it->second), static_cast<Index>(c)) =
            parse_feature_cell(csv, r, c + 1);
      }
    }
    for (std::size_t r = 0; r < meta.size(); ++r) {
      if (!filled[r]) {
        throw AlignmentError(csv.source + ": missing sample_id '" + meta[r].sample_id + "'");
      }
    }
    modalities.push_back(std::move(table));
  }

  return Dataset(std::move(modalities), std::move(meta), std::move(attribute_names));
}

fs::path write_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream manifest;
  manifest << "# fairmix dataset manifest\n";
  for (const auto& m : dataset.modalities()) {
    std::ostringstream features;
    features << "sample_id";
    for (const auto& c : m.columns) features << ',' << c.name;
    features << '\n';
    for (Index r = 0; r < m.n_samples(); ++r) {
      features << dataset.meta()[static_cast<std::size_t>(r)].sample_id;
      for (Index c = 0; c < m.n_features(); ++c) features << ',' << format_double(m.samples(r, c));
      features << '\n';
    }
    write_file_atomic(dir / (m.name + ".csv"), features.str());

    std::ostringstream levels;
    levels << "feature_name,level\n";
    for (const auto& c : m.columns) levels << c.name << ',' << to_string(c.level) << '\n';
    write_file_atomic(dir / (m.name + "_levels.csv"), levels.str());

    manifest << "modality." << m.name << '=' << m.name << ".csv\n";
    manifest << "levels." << m.name << '=' << m.name << "_levels.csv\n";
  }

  std::ostringstream meta;
  meta << "sample_id,subject_id,label";
  for (const auto& a : dataset.attribute_names()) meta << ',' << a;
  meta << '\n';
  for (const auto& s : dataset.meta()) {
    meta << s.sample_id << ',' << s.subject_id << ',' << s.label;
    for (int a : s.attributes) meta << ',' << a;
    meta << '\n';
  }
  write_file_atomic(dir / "metadata.csv", meta.str());
  manifest << "metadata=metadata.csv\n";

  const auto manifest_path = dir / "manifest.txt";
  write_file_atomic(manifest_path, manifest.str());
  return manifest_path;
}

}  // namespace fairmix
