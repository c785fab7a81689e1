#include "riesz/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace riesz::cli {
namespace {

std::string describe(const std::string& source, int line, const std::string& field,
                     const std::string& message) {
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line);
  if (!field.empty()) out += ": field '" + field + "'";
  return out + ": " + message;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return k.find("..") == std::string::npos;
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

class ValueParser {
 public:
  explicit ValueParser(std::string_view text) : s_(text) {}

  Value parse_top() {
    skip();
    Value v = peek() == '[' ? list() : scalar();
    skip();
    if (pos_ != s_.size()) throw std::invalid_argument("unexpected text after value: '" + std::string(s_.substr(pos_)) + "'");
    return v;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  Value list() {
    ++pos_;
    Value v;
    v.kind = Value::Kind::list;
    skip();
    while (peek() != ']') {
      if (peek() == '\0') throw std::invalid_argument("unterminated list");
      if (peek() == '[') throw std::invalid_argument("nested lists are not supported");
      Value item = scalar();
      if (!v.items.empty() && item.kind != v.items.front().kind)
        throw std::invalid_argument("list mixes value types");
      v.items.push_back(std::move(item));
      skip();
      if (peek() == ',') {
        ++pos_;
        skip();
      } else if (peek() != ']') {
        throw std::invalid_argument("expected ',' or ']' in list");
      }
    }
    ++pos_;
    return v;
  }

  Value scalar() {
    if (peek() == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    const std::string token(s_.substr(start, pos_ - start));
    if (token.empty()) throw std::invalid_argument("missing value");
    Value v;
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::boolean;
      v.boolean = token == "true";
      v.text = token;
      return v;
    }
    std::string digits;
    for (char c : token)
      if (c != '_') digits += c;
    const char* first = digits.data() + (digits.front() == '+' ? 1 : 0);
    const char* last = digits.data() + digits.size();
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || !std::isfinite(x))
      throw std::invalid_argument("not a number, boolean or quoted string: '" + token + "'");
    v.kind = Value::Kind::number;
    v.number = x;
    v.text = token;
    return v;
  }

  Value quoted() {
    ++pos_;
    Value v;
    v.kind = Value::Kind::string;
    while (true) {
      if (pos_ >= s_.size()) throw std::invalid_argument("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) throw std::invalid_argument("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': v.text += '\n'; break;
          case 't': v.text += '\t'; break;
          case '"': v.text += '"'; break;
          case '\\': v.text += '\\'; break;
          default: throw std::invalid_argument(std::string("unknown escape \\") + e);
        }
      } else {
        v.text += c;
      }
    }
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::number: return "number";
    case Value::Kind::string: return "string";
    case Value::Kind::boolean: return "boolean";
    case Value::Kind::list: return "list";
  }
  return "?";
}

nlohmann::ordered_json to_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::number: return v.number;
    case Value::Kind::string: return v.text;
    case Value::Kind::boolean: return v.boolean;
    case Value::Kind::list: {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& item : v.items) arr.push_back(to_json(item));
      return arr;
    }
  }
  return nullptr;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, std::string field, const std::string& message)
    : UsageError(describe(source, line, field, message)), field_(std::move(field)), line_(line) {}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  c.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') throw ConfigError(source, line_no, "", "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) throw ConfigError(source, line_no, section, "invalid section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "", "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(source, line_no, key, "invalid key");
    if (!section.empty()) key = section + "." + key;
    if (c.entries_.count(key)) throw ConfigError(source, line_no, key, "duplicate key");
    try {
      c.entries_[key] = Entry{ValueParser(line.substr(eq + 1)).parse_top(), line_no};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line_no, key, e.what());
    }
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set", 0, assignment, "expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string text = trim(assignment.substr(eq + 1));
  if (!valid_key(key)) throw ConfigError("--set", 0, key, "invalid key");
  Value v;
  try {
    v = ValueParser(text).parse_top();
  } catch (const std::invalid_argument& e) {
    const bool bare = !text.empty() && std::isalpha(static_cast<unsigned char>(text.front())) &&
                      text.find_first_of(" \t\",[]") == std::string::npos;
    if (!bare) throw ConfigError("--set", 0, key, e.what());
    v.kind = Value::Kind::string;
    v.text = text;
  }
  entries_[key] = Entry{std::move(v), 0};
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

const Config::Entry& Config::require(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(source_, 0, key, "required key is missing");
  return *e;
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  const int line = it == entries_.end() ? 0 : it->second.line;
  throw ConfigError(it != entries_.end() && line == 0 ? "--set" : source_, line, key, message);
}

double Config::number(const std::string& key) const {
  const Entry& e = require(key);
  if (e.value.kind != Value::Kind::number)
    fail(key, std::string("expected a number, got a ") + kind_name(e.value.kind));
  return e.value.number;
}

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::optional<double> Config::maybe_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

int Config::integer(const std::string& key) const {
  const double x = number(key);
  if (x != std::floor(x) || std::abs(x) > 1e9) fail(key, "expected an integer");
  return static_cast<int>(x);
}

int Config::integer(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string Config::string(const std::string& key) const {
  const Entry& e = require(key);
  if (e.value.kind != Value::Kind::string)
    fail(key, std::string("expected a string, got a ") + kind_name(e.value.kind));
  return e.value.text;
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool Config::boolean(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value.kind != Value::Kind::boolean)
    fail(key, std::string("expected true or false, got a ") + kind_name(e->value.kind));
  return e->value.boolean;
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value.kind == Value::Kind::number) return {e->value.number};
  if (e->value.kind != Value::Kind::list) fail(key, "expected a list of numbers");
  if (e->value.items.empty()) fail(key, "list is empty");
  std::vector<double> out;
  for (const auto& item : e->value.items) {
    if (item.kind != Value::Kind::number) fail(key, "expected a list of numbers");
    out.push_back(item.number);
  }
  return out;
}

std::vector<int> Config::integers(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (double x : numbers(key, {})) {
    if (x != std::floor(x) || std::abs(x) > 1e9) fail(key, "expected a list of integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<std::string> Config::strings(const std::string& key,
                                         const std::vector<std::string>& fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value.kind == Value::Kind::string) return {e->value.text};
  if (e->value.kind != Value::Kind::list) fail(key, "expected a list of strings");
  std::vector<std::string> out;
  for (const auto& item : e->value.items) {
    if (item.kind != Value::Kind::string) fail(key, "expected a list of strings");
    out.push_back(item.text);
  }
  return out;
}

void Config::require_all_used() const {
  for (const auto& [key, entry] : entries_)
    if (!used_.count(key)) fail(key, "unknown key for this subcommand");
}

std::string Config::echo_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, entry] : entries_) j[key] = to_json(entry.value);
  return j.dump();
}

}  // namespace riesz::cli
