#include "pubsim/error.hpp"

#include "pubsim/types.hpp"

namespace pubsim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StagnantFlow: return "StagnantFlow";
    case ErrorCode::GimbalLock: return "GimbalLock";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::PunctureFault: return "PunctureFault";
    case ErrorCode::SingularInertia: return "SingularInertia";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::DivisionByZeroThrust: return "DivisionByZeroThrust";
    case ErrorCode::SingularLyapunov: return "SingularLyapunov";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::SingularMassMatrix: return "SingularMassMatrix";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Wrench operator+(const Wrench& a, const Wrench& b) {
  if (a.frame != b.frame) {
    throw Error(ErrorCode::InvalidArgument, "cannot add wrenches expressed in different frames");
  }
  return Wrench{a.force + b.force, a.moment + b.moment, a.frame};
}

}  // namespace pubsim
