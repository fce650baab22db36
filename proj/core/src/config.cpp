#include "tlasso/config.hpp"

#include <fstream>
#include <istream>

#include "tlasso/errors.hpp"
#include "text.hpp"

#ifndef TLASSO_VERSION
#define TLASSO_VERSION "0.0.0"
#endif

namespace tlasso {

std::string_view library_version() { return TLASSO_VERSION; }

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (text::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set_assignment(line);
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config file '" + path + "'");
  return parse(in);
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  if (key.empty()) fail(ErrorCode::config, "empty config key");
  if (!values_.contains(key)) order_.push_back(key);
  values_[key] = std::move(value);
}

void KeyValueConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) fail(ErrorCode::config, "expected key=value, got '" + std::string(assignment) + "'");
  set(std::string(text::trim(assignment.substr(0, eq))), std::string(text::trim(assignment.substr(eq + 1))));
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

}  // namespace tlasso
