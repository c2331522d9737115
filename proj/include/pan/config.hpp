#ifndef PAN_CONFIG_HPP
#define PAN_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "pan/linalg.hpp"

namespace pan {

// Flat key=value configuration with [section] headers and '#' comments.
// Keys are stored as "section.key" ("" section for the preamble).
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  Vec get_list(const std::string& key, const Vec& fallback) const;  // comma separated

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  // canonical "key=value\n" dump in sorted key order, used for digests
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pan

#endif
