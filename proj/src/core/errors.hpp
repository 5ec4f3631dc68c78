#pragma once

#include <stdexcept>
#include <string>

namespace hdh {

// Mirrors the status codes exposed through the C API.
enum class ErrorCode {
  Config = 1,
  Io = 2,
  Capacity = 3,
  Ecc = 4,
  Verify = 5,
  Shape = 6,
  Checkpoint = 7,
  Invalid = 8,
  Internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace hdh
