#pragma once

#include <stdexcept>
#include <string>

namespace sgp {

enum class ErrorCode {
  invalid_argument,  // caller violated a precondition
  io,                // file missing / unreadable / unwritable
  parse,             // malformed file content
  config,            // config value violates an invariant
  no_model,          // estimator could not produce a model
  numeric,           // non-finite values where finite required
  internal
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sgp
