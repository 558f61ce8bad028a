#pragma once

#include <stdexcept>
#include <string>

namespace parafermion {

// Mirrors pf_status in parafermion.h; values are part of the C ABI.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kOutOfDomain = 2,
  kNumerical = 3,
  kUnderResolved = 4,
  kIo = 5,
  kVerificationFailed = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace parafermion
