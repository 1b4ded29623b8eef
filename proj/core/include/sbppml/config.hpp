#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbppml {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration. Lines starting with '#' and blank lines
/// are ignored, values may be quoted, later assignments override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& source = "<string>");
  static KeyValueConfig parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Applies a `key=value` override.
  void apply_override(const std::string& assignment);
  void merge(const KeyValueConfig& other);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Strict numeric parsing; errors name the field.
double parse_double_field(const std::string& field, const std::string& text);
long parse_int_field(const std::string& field, const std::string& text);
std::vector<double> parse_double_list(const std::string& field, const std::string& text);
std::vector<int> parse_int_list(const std::string& field, const std::string& text);

}  // namespace sbppml
