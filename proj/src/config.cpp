#include "pan/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pan/errors.hpp"

namespace pan {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end != it->second.c_str() + it->second.size())
    throw ParseError("config key '" + key + "': not a number: " + it->second);
  return v;
}

long Config::get_long(const std::string& key, long fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  return static_cast<long>(v);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return std::strtoull(it->second.c_str(), nullptr, 10);
}

Vec Config::get_list(const std::string& key, const Vec& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  Vec out;
  std::istringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size())
      throw ParseError("config key '" + key + "': not a number: " + item);
    out.push_back(v);
  }
  if (out.empty())
    throw ParseError("config key '" + key + "': empty list");
  return out;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace pan
