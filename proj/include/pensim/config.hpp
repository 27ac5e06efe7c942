#ifndef PENSIM_CONFIG_HPP
#define PENSIM_CONFIG_HPP

#include <map>
#include <string>

namespace pensim {

// Flat `key = value` configuration with `[section]` headers and `#`
// comments. Keys inside a section are addressed as "section.key".
class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pensim

#endif  // PENSIM_CONFIG_HPP
