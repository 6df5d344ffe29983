#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cq {

/// One parsed config value: integer, float, quoted string, or a flat array of
/// those scalars.
class ConfigValue {
 public:
  enum class Type { Integer, Float, String, Array };

  static ConfigValue integer(long long v);
  static ConfigValue real(double v);
  static ConfigValue string(std::string v);
  static ConfigValue array(std::vector<ConfigValue> v);

  Type type() const noexcept { return type_; }
  bool is_number() const noexcept {
    return type_ == Type::Integer || type_ == Type::Float;
  }

  long long as_integer() const;
  double as_double() const;  // integers convert
  const std::string& as_string() const;
  const std::vector<ConfigValue>& as_array() const;
  std::vector<double> as_double_array() const;

 private:
  Type type_ = Type::Integer;
  long long int_ = 0;
  double float_ = 0.0;
  std::string string_;
  std::vector<ConfigValue> array_;
};

struct ConfigEntry {
  std::string key;
  ConfigValue value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
  int line = 0;

  const ConfigValue* find(const std::string& key) const;
  const ConfigValue& require(const std::string& key) const;

  long long get_integer(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::optional<std::vector<double>> get_double_array(const std::string& key) const;
};

/// `#` comments, [section] headers, key = value lines. Sections keep file
/// order and may repeat.
struct ConfigFile {
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& name) const;
  std::vector<const ConfigSection*> find_all(const std::string& name) const;
};

class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(const std::string& message, int line);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

ConfigFile parse_config(const std::string& text);
ConfigFile parse_config_file(const std::string& path);

}  // namespace cq
