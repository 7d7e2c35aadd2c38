#include <cmath>
#include <fstream>
#include <sstream>

#include "urt/cli.hpp"
#include "urt/error.hpp"

namespace urt::cli {
namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error("cli", ErrorKind::configuration, message);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail("'" + key + "' is not a number: '" + text + "'");
  }
  if (trim(text.substr(used)) != "" || !std::isfinite(v)) {
    fail("'" + key + "' is not a finite number: '" + text + "'");
  }
  return v;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') fail(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (c.entries_.count(full)) fail(where + ": duplicate key '" + full + "'");
    c.entries_[full] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cli", ErrorKind::io, "cannot open config '" + path + "'");
  return parse(in, path);
}

Settings::Settings(const Schema& schema, const Config& config)
    : values_(schema) {
  for (const auto& [key, value] : config.entries()) {
    if (!schema.count(key)) fail("unknown config key '" + key + "'");
    values_[key] = value;
  }
}

const std::string& Settings::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail("missing config key '" + key + "'");
  return it->second;
}

double Settings::number(const std::string& key) const {
  return parse_number(key, text(key));
}

int Settings::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    fail("'" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

bool Settings::flag(const std::string& key) const {
  const std::string& v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail("'" + key + "' must be true or false");
}

std::vector<double> Settings::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_number(key, trim(item)));
  }
  return out;
}

}  // namespace urt::cli
