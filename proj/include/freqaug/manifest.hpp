#pragma once

// Run manifests: flat `key=value` text recording everything needed to rerun a
// command and check that it produced the same bytes.
//
//   toolkit=freqaug
//   version=0.3.0
//   command=augment
//   arg.radius=4
//   input.input=<path> fnv1a64:<16 hex digits>
//   output.output=<path> fnv1a64:<16 hex digits>
//
// Keys may repeat (a repeated option yields one line per value); line order
// is preserved on parse.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/tensorio.hpp"
#include "freqaug/version.hpp"

namespace freqaug {

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[static_cast<std::size_t>(k)] = digits[v & 0xf];
  return s;
}

inline std::string file_digest(const std::filesystem::path& path) {
  return "fnv1a64:" + hex64(fnv1a64(read_file(path)));
}

class Manifest {
 public:
  using Entry = std::pair<std::string, std::string>;

  static Manifest for_command(const std::string& command) {
    Manifest m;
    m.add("toolkit", "freqaug");
    m.add("version", kVersion);
    m.add("command", command);
    return m;
  }

  void add(std::string key, std::string value) {
    if (key.empty() || key.find_first_of("=\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw ArgumentError("manifest entry '" + key + "' cannot be stored on one line");
    }
    entries_.emplace_back(std::move(key), std::move(value));
  }

  void arg(const std::string& name, const std::string& value) { add("arg." + name, value); }
  void input(const std::string& name, const std::filesystem::path& path) {
    add("input." + name, path.string() + " " + file_digest(path));
  }
  void output(const std::string& name, const std::filesystem::path& path) {
    add("output." + name, path.string() + " " + file_digest(path));
  }
  void output_text(const std::string& name, std::string_view text) {
    add("output." + name, "- fnv1a64:" + hex64(fnv1a64(text)));
  }

  const std::vector<Entry>& entries() const { return entries_; }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return v;
    return std::nullopt;
  }

  /// Entries whose key starts with `prefix`, prefix stripped.
  std::vector<Entry> with_prefix(std::string_view prefix) const {
    std::vector<Entry> out;
    for (const auto& [k, v] : entries_) {
      if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) {
        out.emplace_back(k.substr(prefix.size()), v);
      }
    }
    return out;
  }

  std::string text() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
  }

  static Manifest parse(const std::string& text) {
    Manifest m;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw FormatError("manifest line " + std::to_string(lineno) + " is not key=value: '" +
                          line + "'");
      }
      m.entries_.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    if (m.get("toolkit") != "freqaug" || !m.get("command")) {
      throw FormatError("not a freqaug manifest (toolkit/command keys missing)");
    }
    return m;
  }

  static Manifest load(const std::filesystem::path& path) {
    const Bytes b = read_file(path);
    return parse(std::string(b.begin(), b.end()));
  }

  void save(const std::filesystem::path& path) const {
    const std::string t = text();
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(t.data()), t.size()));
  }

 private:
  std::vector<Entry> entries_;
};

/// Splits "<path> fnv1a64:<hex>" into its parts.
inline std::pair<std::string, std::string> split_digest(const std::string& value) {
  const auto sp = value.rfind(' ');
  if (sp == std::string::npos || value.compare(sp + 1, 8, "fnv1a64:") != 0) {
    throw FormatError("manifest value '" + value + "' lacks a content digest");
  }
  return {value.substr(0, sp), value.substr(sp + 1)};
}

}  // namespace freqaug
