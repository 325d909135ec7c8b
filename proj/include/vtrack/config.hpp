#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vtrack {

/// Ordered `key = value` configuration with `[section]` headers and `#`
/// comments. Keys are single words; any other line inside a section is kept
/// verbatim as a list item (used by [segments], whose lines carry '=' in
/// their attributes). Repeated keys are preserved in order; scalar getters
/// read the last occurrence.
class Config {
 public:
  struct Entry {
    std::string key;    // empty for list items
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;  // "" for the leading unnamed section
    std::vector<Entry> entries;
  };

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  const std::string& origin() const { return origin_; }

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> raw(const std::string& section,
                                 const std::string& key) const;

  /// Typed getters; fall back to def when absent, throw ConfigError with
  /// origin:line when present but unparsable.
  double get_double(const std::string& section, const std::string& key,
                    double def) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t def) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool def) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& def) const;

  /// All values of a repeated key, in order.
  std::vector<std::string> all(const std::string& section,
                               const std::string& key) const;
  /// List items (lines without '=') of a section, in order, with lines.
  std::vector<Entry> items(const std::string& section) const;

  /// Known-key guard: throws ConfigError if the section contains a key not
  /// in `known` (catches typos like `steer_max` vs `steermax`).
  void check_keys(const std::string& section,
                  const std::vector<std::string>& known) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);
  void add_item(const std::string& section, const std::string& line);

  /// Round-trippable rendering: parse_string(to_string()) preserves every
  /// entry in order.
  std::string to_string() const;

 private:
  const Entry* find(const std::string& section, const std::string& key) const;
  Section& section_ref(const std::string& name);

  std::string origin_ = "<empty>";
  std::vector<Section> sections_;
};

}  // namespace vtrack
