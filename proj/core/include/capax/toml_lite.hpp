#pragma once

#include <map>
#include <string>
#include <vector>

namespace capax::toml {

/// Minimal TOML reader covering the configuration needs: [table] headers,
/// key = value with strings, booleans, numbers and (nested) arrays,
/// comments, and multi-line arrays. Keys are flattened to dotted paths.
struct Value {
  enum class Type { String, Bool, Number, Array };
  Type type = Type::Number;
  std::string str;
  bool boolean = false;
  double number = 0.0;
  std::vector<Value> array;
};

class Table {
 public:
  static Table parse_text(const std::string& text, const std::string& origin = "<text>");
  static Table parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const Value& get(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key) const;
  double get_number_or(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<double> get_number_array(const std::string& key) const;
  const std::vector<Value>& get_array(const std::string& key) const;

  const std::map<std::string, Value>& entries() const { return values_; }
  /// Raw bytes the table was parsed from (config hashing).
  const std::string& raw_text() const { return raw_; }

 private:
  std::map<std::string, Value> values_;
  std::string raw_;
};

}  // namespace capax::toml
