#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlasso {

std::string_view library_version();

/// Plain-text `key = value` configuration. '#' starts a comment; blank lines
/// are ignored; a repeated key keeps the last value. Keys remember the order
/// they were first seen in, so echoing a config is deterministic.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  /// Adds or overrides one key (how CLI flags override file values).
  void set(const std::string& key, std::string value);
  /// Parses `key=value` (the CLI's --set form).
  void set_assignment(std::string_view assignment);

  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::string>& keys() const { return order_; }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

}  // namespace tlasso
