#include "tlasso/errors.hpp"

namespace tlasso {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_link: return "invalid-link";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::not_sub_gaussian: return "not-sub-gaussian";
    case ErrorCode::shape: return "shape";
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::unbounded_width: return "unbounded-width";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::invalid_anchor: return "invalid-anchor";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::config: return "config";
    case ErrorCode::fit_undefined: return "fit-undefined";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tlasso
