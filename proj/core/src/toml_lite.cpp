#include "capax/toml_lite.hpp"

#include "capax/common.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace capax::toml {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line = 1;
  const std::string& origin;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  char take() {
    const char c = s[i++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) take();
  }
  // Skips whitespace, newlines and comments (used inside arrays).
  void skip_ws_any() {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        take();
      } else if (c == '#') {
        while (!done() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }
};

std::string parse_basic_string(Cursor& c) {
  std::string out;
  c.take();  // opening quote
  while (true) {
    if (c.done()) c.fail("unterminated string");
    const char ch = c.take();
    if (ch == '"') break;
    if (ch == '\n') c.fail("newline in string");
    if (ch == '\\') {
      if (c.done()) c.fail("dangling escape");
      const char e = c.take();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: c.fail(std::string("unsupported escape \\") + e);
      }
    } else {
      out += ch;
    }
  }
  return out;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.type = Value::Type::Array;
  c.take();  // '['
  c.skip_ws_any();
  while (true) {
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    v.array.push_back(parse_value(c));
    c.skip_ws_any();
    if (!c.done() && c.peek() == ',') {
      c.take();
      c.skip_ws_any();
    } else {
      c.skip_ws_any();
      if (c.done() || c.peek() != ']') c.fail("expected ',' or ']' in array");
    }
  }
  return v;
}

Value parse_value(Cursor& c) {
  c.skip_ws_any();
  if (c.done()) c.fail("expected a value");
  const char ch = c.peek();
  if (ch == '"') {
    Value v;
    v.type = Value::Type::String;
    v.str = parse_basic_string(c);
    return v;
  }
  if (ch == '[') return parse_array(c);
  std::string tok;
  while (!c.done()) {
    const char t = c.peek();
    if (t == '\n' || t == ',' || t == ']' || t == '#' || t == ' ' || t == '\t' ||
        t == '\r')
      break;
    tok += c.take();
  }
  if (tok == "true" || tok == "false") {
    Value v;
    v.type = Value::Type::Bool;
    v.boolean = tok == "true";
    return v;
  }
  try {
    std::size_t pos = 0;
    const double num = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    Value v;
    v.type = Value::Type::Number;
    v.number = num;
    return v;
  } catch (const std::exception&) {
    c.fail("cannot parse value '" + tok + "'");
  }
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

}  // namespace

Table Table::parse_text(const std::string& text, const std::string& origin) {
  Table t;
  t.raw_ = text;
  Cursor c{text, 0, 1, origin};
  std::string prefix;
  while (true) {
    c.skip_ws_any();
    if (c.done()) break;
    if (c.peek() == '[') {
      c.take();
      std::string name;
      while (!c.done() && c.peek() != ']') {
        const char ch = c.take();
        if (!is_key_char(ch)) c.fail("bad character in table name");
        name += ch;
      }
      if (c.done()) c.fail("unterminated table header");
      c.take();  // ']'
      if (name.empty()) c.fail("empty table name");
      prefix = name + ".";
      continue;
    }
    std::string key;
    while (!c.done() && is_key_char(c.peek())) key += c.take();
    if (key.empty()) c.fail("expected a key");
    c.skip_ws_inline();
    if (c.done() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.take();
    c.skip_ws_inline();
    const Value v = parse_value(c);
    const std::string full = prefix + key;
    if (t.values_.count(full)) c.fail("duplicate key '" + full + "'");
    t.values_[full] = v;
    c.skip_ws_inline();
    if (!c.done() && c.peek() == '#')
      while (!c.done() && c.peek() != '\n') c.take();
    if (!c.done() && c.peek() != '\n' && c.peek() != '\r')
      c.fail("trailing characters after value for key '" + full + "'");
  }
  return t;
}

Table Table::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

const Value& Table::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Table::get_string(const std::string& key) const {
  const Value& v = get(key);
  if (v.type != Value::Type::String)
    throw ConfigError("config key '" + key + "' must be a string");
  return v.str;
}

std::string Table::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Table::get_number(const std::string& key) const {
  const Value& v = get(key);
  if (v.type != Value::Type::Number)
    throw ConfigError("config key '" + key + "' must be a number");
  return v.number;
}

double Table::get_number_or(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

long Table::get_int(const std::string& key) const {
  const double v = get_number(key);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    throw ConfigError("config key '" + key + "' must be an integer");
  return n;
}

long Table::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Table::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = get(key);
  if (v.type != Value::Type::Bool)
    throw ConfigError("config key '" + key + "' must be a boolean");
  return v.boolean;
}

std::vector<double> Table::get_number_array(const std::string& key) const {
  const Value& v = get(key);
  if (v.type != Value::Type::Array)
    throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v.array) {
    if (e.type != Value::Type::Number)
      throw ConfigError("config key '" + key + "' must be an array of numbers");
    out.push_back(e.number);
  }
  return out;
}

const std::vector<Value>& Table::get_array(const std::string& key) const {
  const Value& v = get(key);
  if (v.type != Value::Type::Array)
    throw ConfigError("config key '" + key + "' must be an array");
  return v.array;
}

}  // namespace capax::toml
