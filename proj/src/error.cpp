#include "wealthlab/error.hpp"

namespace wealthlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::InvalidAgent: return "InvalidAgent";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NoInteriorOptimum: return "NoInteriorOptimum";
    case ErrorCode::NoClearing: return "NoClearing";
    case ErrorCode::NoDemand: return "NoDemand";
    case ErrorCode::DivergentSolution: return "DivergentSolution";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroTotal: return "ZeroTotal";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

}  // namespace wealthlab
