#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlasso {

enum class ErrorCode {
  invalid_link,
  numerical_failure,
  not_sub_gaussian,
  shape,
  invalid_spec,
  unbounded_width,
  invalid_parameter,
  invalid_anchor,
  invalid_input,
  config,
  fit_undefined,
  io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries an ErrorCode so callers (and
/// the CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace tlasso
