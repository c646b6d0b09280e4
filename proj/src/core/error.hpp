#pragma once

#include <stdexcept>
#include <string>

namespace tnac {

enum class ErrorCode {
    invalid_argument = 1,
    shape_mismatch = 2,
    budget_exceeded = 3,
    io_error = 4,
    parse_error = 5,
    internal = 6,
};

// Single exception type used throughout the core. The C API maps `code` onto
// its status enum and surfaces `what()` through tnac_last_error().
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
    if (!ok) fail(code, message);
}

}  // namespace tnac
