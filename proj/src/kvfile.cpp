#include "fairmix/kvfile.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fairmix/error.hpp"

namespace fairmix {

std::string trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<KeyValueEntry> parse_key_values(std::string_view text, std::string_view source) {
  std::vector<KeyValueEntry> entries;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    KeyValueEntry entry{trim(std::string_view(line).substr(0, eq)),
                        trim(std::string_view(line).substr(eq + 1)), line_no};
    if (entry.key.empty()) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    }
    if (!seen.insert(entry.key).second) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": duplicate key '" + entry.key + "'");
    }
    entries.push_back(std::move(entry));
    if (end == text.size()) break;
  }
  return entries;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<KeyValueEntry> read_key_value_file(const std::filesystem::path& path) {
  return parse_key_values(read_file(path), path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fairmix
