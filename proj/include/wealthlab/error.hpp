#pragma once

#include <stdexcept>
#include <string>

namespace wealthlab {

enum class ErrorCode {
  InvalidSize,
  InvalidAgent,
  InvalidParameter,
  NoInteriorOptimum,
  NoClearing,
  NoDemand,
  DivergentSolution,
  EmptyInput,
  ZeroTotal,
  InsufficientTail,
  MalformedInput,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for every model and estimator failure; callers
// branch on code() rather than on the dynamic type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) throw Error(code, message);
}

}  // namespace wealthlab
