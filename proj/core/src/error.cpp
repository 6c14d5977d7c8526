#include "hitdyn/error.hpp"

namespace hitdyn {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NetTooLarge: return "NetTooLarge";
    case ErrorCode::BadSymbol: return "BadSymbol";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DegenerateLipschitz: return "DegenerateLipschitz";
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::NoGap: return "NoGap";
    case ErrorCode::BasinCheckFailed: return "BasinCheckFailed";
    case ErrorCode::TransitionNotFound: return "TransitionNotFound";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hitdyn
