#pragma once

#include <stdexcept>
#include <string>

namespace hetcache {

enum class ErrorCode {
  InvalidParam,
  NonConvergence,
  DegenerateInput,
  InfeasibleMarginals,
  InfeasibleSum,
  InstanceTooLarge,
  NonMonotoneCCP,
  MaxIters,
  NoEligibleServer,
  ConfigError,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code() when they
// need to distinguish failure kinds (the CLI maps ConfigError to exit 2).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace hetcache
