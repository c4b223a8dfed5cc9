#include "driftbound/error.hpp"

namespace driftbound {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InteriorPoint: return "InteriorPoint";
    case ErrorCode::RadiusTooSmall: return "RadiusTooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EvalDomain: return "EvalDomain";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::LambdaOutsideWindow: return "LambdaOutsideWindow";
    case ErrorCode::NegativeForcingMajorant: return "NegativeForcingMajorant";
    case ErrorCode::BadGeometry: return "BadGeometry";
    case ErrorCode::NotIncreasing: return "NotIncreasing";
    case ErrorCode::NoValidT0: return "NoValidT0";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorCode::RangeExit: return "RangeExit";
    case ErrorCode::Instability: return "Instability";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace driftbound
