#include "hetcache/error.hpp"

namespace hetcache {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InfeasibleMarginals: return "InfeasibleMarginals";
    case ErrorCode::InfeasibleSum: return "InfeasibleSum";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NonMonotoneCCP: return "NonMonotoneCCP";
    case ErrorCode::MaxIters: return "MaxIters";
    case ErrorCode::NoEligibleServer: return "NoEligibleServer";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace hetcache
