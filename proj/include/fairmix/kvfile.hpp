#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairmix {

// Ordered `key=value` entries. Blank lines and lines starting with '#' are
// ignored; whitespace around keys and values is trimmed.
struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Throws ConfigError on malformed lines or duplicate keys.
std::vector<KeyValueEntry> parse_key_values(std::string_view text,
                                            std::string_view source = "<text>");

std::vector<KeyValueEntry> read_key_value_file(const std::filesystem::path& path);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Writes `contents` next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace fairmix
