#include "vtrack/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vtrack/errors.hpp"

namespace vtrack {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text,
                            const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  cfg.sections_.push_back({"", {}});
  Section* cur = &cfg.sections_.back();

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(origin, lineno, "malformed section header: " + line);
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      cfg.sections_.push_back({name, {}});
      cur = &cfg.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      cur->entries.push_back({"", line, lineno});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(origin, lineno, "missing key before '='");
    }
    // a key is a single word; anything else ("straight length=400") is a
    // verbatim list item that happens to contain '='
    if (key.find_first_of(" \t") != std::string::npos) {
      cur->entries.push_back({"", line, lineno});
      continue;
    }
    const std::string value = trim(line.substr(eq + 1));
    cur->entries.push_back({key, value, lineno});
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
  const Entry* hit = nullptr;
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& e : s.entries) {
      if (e.key == key) hit = &e;  // last occurrence wins
    }
  }
  return hit;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::optional<std::string> Config::raw(const std::string& section,
                                       const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  char* end = nullptr;
  const double v = std::strtod(e->value.c_str(), &end);
  if (end == e->value.c_str() || *end != '\0') {
    throw ConfigError(origin_, e->line,
                      "expected a number for " + section + "." + key +
                          ", got '" + e->value + "'");
  }
  return v;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  char* end = nullptr;
  const long long v = std::strtoll(e->value.c_str(), &end, 10);
  if (end == e->value.c_str() || *end != '\0') {
    throw ConfigError(origin_, e->line,
                      "expected an integer for " + section + "." + key +
                          ", got '" + e->value + "'");
  }
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ConfigError(origin_, e->line,
                    "expected a boolean for " + section + "." + key +
                        ", got '" + e->value + "'");
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& def) const {
  const Entry* e = find(section, key);
  return e ? e->value : def;
}

std::vector<std::string> Config::all(const std::string& section,
                                     const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& e : s.entries) {
      if (e.key == key) out.push_back(e.value);
    }
  }
  return out;
}

std::vector<Config::Entry> Config::items(const std::string& section) const {
  std::vector<Entry> out;
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& e : s.entries) {
      if (e.key.empty()) out.push_back(e);
    }
  }
  return out;
}

void Config::check_keys(const std::string& section,
                        const std::vector<std::string>& known) const {
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& e : s.entries) {
      if (e.key.empty()) continue;
      if (std::find(known.begin(), known.end(), e.key) == known.end()) {
        throw ConfigError(origin_, e.line,
                          "unknown key '" + e.key + "' in [" + section + "]");
      }
    }
  }
}

Config::Section& Config::section_ref(const std::string& name) {
  for (auto& s : sections_) {
    if (s.name == name) return s;
  }
  sections_.push_back({name, {}});
  return sections_.back();
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  Section& s = section_ref(section);
  for (auto& e : s.entries) {
    if (e.key == key) {
      e.value = value;
      return;
    }
  }
  s.entries.push_back({key, value, 0});
}

void Config::add_item(const std::string& section, const std::string& line) {
  section_ref(section).entries.push_back({"", line, 0});
}

std::string Config::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : sections_) {
    if (s.name.empty() && s.entries.empty()) continue;
    if (!s.name.empty()) {
      if (!first) out << '\n';
      out << '[' << s.name << "]\n";
    }
    first = false;
    for (const auto& e : s.entries) {
      if (e.key.empty()) {
        out << e.value << '\n';
      } else {
        out << e.key << " = " << e.value << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace vtrack
