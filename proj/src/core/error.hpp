#pragma once

#include <stdexcept>
#include <string>

namespace hpm {

// Error codes shared with the C API (see include/hpm.h).
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  GridMismatch = 2,
  ParseError = 3,
  IoError = 4,
  LimitExceeded = 5,
  NotReady = 6,
  NotFound = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hpm
