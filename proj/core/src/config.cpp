#include "cq/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cq {

ConfigValue ConfigValue::integer(long long v) {
  ConfigValue out;
  out.type_ = Type::Integer;
  out.int_ = v;
  return out;
}

ConfigValue ConfigValue::real(double v) {
  ConfigValue out;
  out.type_ = Type::Float;
  out.float_ = v;
  return out;
}

ConfigValue ConfigValue::string(std::string v) {
  ConfigValue out;
  out.type_ = Type::String;
  out.string_ = std::move(v);
  return out;
}

ConfigValue ConfigValue::array(std::vector<ConfigValue> v) {
  ConfigValue out;
  out.type_ = Type::Array;
  out.array_ = std::move(v);
  return out;
}

long long ConfigValue::as_integer() const {
  if (type_ != Type::Integer)
    throw std::runtime_error("config value is not an integer");
  return int_;
}

double ConfigValue::as_double() const {
  if (type_ == Type::Integer) return static_cast<double>(int_);
  if (type_ == Type::Float) return float_;
  throw std::runtime_error("config value is not a number");
}

const std::string& ConfigValue::as_string() const {
  if (type_ != Type::String)
    throw std::runtime_error("config value is not a string");
  return string_;
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
  if (type_ != Type::Array)
    throw std::runtime_error("config value is not an array");
  return array_;
}

std::vector<double> ConfigValue::as_double_array() const {
  const auto& items = as_array();
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.as_double());
  return out;
}

const ConfigValue* ConfigSection::find(const std::string& key) const {
  for (const auto& entry : entries)
    if (entry.key == key) return &entry.value;
  return nullptr;
}

const ConfigValue& ConfigSection::require(const std::string& key) const {
  const ConfigValue* value = find(key);
  if (!value)
    throw std::runtime_error("config section [" + name + "] is missing key '" +
                             key + "'");
  return *value;
}

long long ConfigSection::get_integer(const std::string& key,
                                     long long fallback) const {
  const ConfigValue* value = find(key);
  return value ? value->as_integer() : fallback;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  const ConfigValue* value = find(key);
  return value ? value->as_double() : fallback;
}

std::string ConfigSection::get_string(const std::string& key,
                                      const std::string& fallback) const {
  const ConfigValue* value = find(key);
  return value ? value->as_string() : fallback;
}

std::optional<std::vector<double>> ConfigSection::get_double_array(
    const std::string& key) const {
  const ConfigValue* value = find(key);
  if (!value) return std::nullopt;
  return value->as_double_array();
}

const ConfigSection* ConfigFile::find(const std::string& name) const {
  for (const auto& section : sections)
    if (section.name == name) return &section;
  return nullptr;
}

std::vector<const ConfigSection*> ConfigFile::find_all(
    const std::string& name) const {
  std::vector<const ConfigSection*> out;
  for (const auto& section : sections)
    if (section.name == name) out.push_back(&section);
  return out;
}

ConfigParseError::ConfigParseError(const std::string& message, int line)
    : std::runtime_error("config line " + std::to_string(line) + ": " + message),
      line_(line) {}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_space_in_line() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }
};

std::string parse_quoted(Cursor& cur) {
  const int start_line = cur.line;
  cur.take();  // opening quote
  std::string out;
  for (;;) {
    if (cur.done() || cur.peek() == '\n')
      throw ConfigParseError("unterminated string", start_line);
    const char c = cur.take();
    if (c == '"') return out;
    if (c == '\\') {
      if (cur.done()) throw ConfigParseError("dangling escape", start_line);
      const char esc = cur.take();
      switch (esc) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default:
          throw ConfigParseError(std::string("unknown escape \\") + esc, start_line);
      }
      continue;
    }
    out += c;
  }
}

bool is_number_char(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
         c == '.' || c == 'e' || c == 'E';
}

ConfigValue parse_number(Cursor& cur) {
  const int start_line = cur.line;
  std::string token;
  while (!cur.done() && is_number_char(cur.peek())) token += cur.take();
  if (token.empty()) throw ConfigParseError("expected a number", start_line);

  const bool looks_integral =
      token.find_first_of(".eE") == std::string::npos;
  if (looks_integral) {
    long long value = 0;
    const auto res =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec == std::errc() && res.ptr == token.data() + token.size())
      return ConfigValue::integer(value);
  }
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size())
      throw ConfigParseError("malformed number '" + token + "'", start_line);
    return ConfigValue::real(value);
  } catch (const ConfigParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigParseError("malformed number '" + token + "'", start_line);
  }
}

ConfigValue parse_scalar(Cursor& cur) {
  if (cur.peek() == '"') return ConfigValue::string(parse_quoted(cur));
  return parse_number(cur);
}

ConfigValue parse_value(Cursor& cur) {
  cur.skip_space_in_line();
  if (cur.done() || cur.peek() == '\n' || cur.peek() == '#')
    throw ConfigParseError("missing value", cur.line);
  if (cur.peek() != '[') return parse_scalar(cur);

  const int start_line = cur.line;
  cur.take();  // '['
  std::vector<ConfigValue> items;
  for (;;) {
    // arrays may span lines
    while (!cur.done() &&
           (cur.peek() == ' ' || cur.peek() == '\t' || cur.peek() == '\r' ||
            cur.peek() == '\n'))
      cur.take();
    if (cur.done()) throw ConfigParseError("unterminated array", start_line);
    if (cur.peek() == ']') {
      cur.take();
      return ConfigValue::array(std::move(items));
    }
    items.push_back(parse_scalar(cur));
    while (!cur.done() &&
           (cur.peek() == ' ' || cur.peek() == '\t' || cur.peek() == '\r' ||
            cur.peek() == '\n'))
      cur.take();
    if (cur.done()) throw ConfigParseError("unterminated array", start_line);
    if (cur.peek() == ',') {
      cur.take();
      continue;
    }
    if (cur.peek() == ']') {
      cur.take();
      return ConfigValue::array(std::move(items));
    }
    throw ConfigParseError("expected ',' or ']' in array", cur.line);
  }
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.';
}

}  // namespace

ConfigFile parse_config(const std::string& text) {
  ConfigFile file;
  Cursor cur{text};
  ConfigSection* section = nullptr;

  while (!cur.done()) {
    cur.skip_space_in_line();
    if (cur.done()) break;
    const char c = cur.peek();
    if (c == '\n') {
      cur.take();
      continue;
    }
    if (c == '#') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
      continue;
    }
    if (c == '[') {
      const int line = cur.line;
      cur.take();
      std::string name;
      while (!cur.done() && cur.peek() != ']' && cur.peek() != '\n')
        name += cur.take();
      if (cur.done() || cur.peek() != ']')
        throw ConfigParseError("unterminated section header", line);
      cur.take();
      if (name.empty()) throw ConfigParseError("empty section name", line);
      file.sections.push_back(ConfigSection{name, {}, line});
      section = &file.sections.back();
      continue;
    }
    if (!is_key_char(c))
      throw ConfigParseError(std::string("unexpected character '") + c + "'",
                             cur.line);

    const int line = cur.line;
    std::string key;
    while (!cur.done() && is_key_char(cur.peek())) key += cur.take();
    cur.skip_space_in_line();
    if (cur.done() || cur.peek() != '=')
      throw ConfigParseError("expected '=' after key '" + key + "'", line);
    cur.take();
    ConfigValue value = parse_value(cur);
    cur.skip_space_in_line();
    if (!cur.done() && cur.peek() == '#')
      while (!cur.done() && cur.peek() != '\n') cur.take();
    if (!cur.done() && cur.peek() != '\n')
      throw ConfigParseError("trailing characters after value for key '" + key +
                                 "'",
                             line);
    if (!section)
      throw ConfigParseError("key '" + key + "' appears before any [section]",
                             line);
    section->entries.push_back(ConfigEntry{std::move(key), std::move(value), line});
  }
  return file;
}

ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace cq
