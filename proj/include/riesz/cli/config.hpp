#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "riesz/grid.hpp"

namespace riesz::cli {

/// Bad config text or a field outside its allowed range. Carries the line
/// (0 for overrides and missing keys) and the field name.
class ConfigError : public UsageError {
 public:
  ConfigError(std::string source, int line, std::string field, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct Value {
  enum class Kind { number, string, boolean, list };
  Kind kind = Kind::number;
  double number = 0.0;
  std::string text;  // string payload, or the literal token for numbers
  bool boolean = false;
  std::vector<Value> items;
};

/// Flat key = value file in a TOML subset: numbers, quoted strings, booleans,
/// single-line lists of scalars, "#" comments and [section] key prefixes.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  /// Applies "key=value". The value uses file syntax; a bare word is taken as a string.
  void set(const std::string& assignment);

  bool has(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& fallback) const;
  std::optional<double> maybe_number(const std::string& key) const;

  /// Throws ConfigError naming the first key that was never read.
  void require_all_used() const;

  /// Throws ConfigError for key with the entry's line.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  /// Entries as a JSON object, keys sorted.
  std::string echo_json() const;

 private:
  struct Entry {
    Value value;
    int line = 0;
  };
  const Entry* find(const std::string& key) const;
  const Entry& require(const std::string& key) const;

  std::string source_ = "<config>";
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace riesz::cli
