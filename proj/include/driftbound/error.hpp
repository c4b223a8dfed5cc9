#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace driftbound {

enum class ErrorCode {
  InteriorPoint,
  RadiusTooSmall,
  ParseError,
  EvalDomain,
  BadParameter,
  OutOfRange,
  LambdaOutsideWindow,
  NegativeForcingMajorant,
  BadGeometry,
  NotIncreasing,
  NoValidT0,
  HypothesisFailed,
  RangeViolation,
  UnsupportedDomain,
  RangeExit,
  Instability,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure the library reports. The code is stable
/// and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::vector<std::string> expected, const std::string& message)
      : Error(ErrorCode::ParseError, message + " at position " + std::to_string(position)),
        position_(position),
        expected_(std::move(expected)) {}

  [[nodiscard]] std::size_t position() const noexcept { return position_; }
  [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// Raised when a named hypothesis of a certificate cannot be established.
class HypothesisFailed : public Error {
 public:
  HypothesisFailed(std::string assumption, std::string quote_key, const std::string& message)
      : Error(ErrorCode::HypothesisFailed, assumption + " [" + quote_key + "]: " + message),
        assumption_(std::move(assumption)),
        quote_key_(std::move(quote_key)) {}

  [[nodiscard]] const std::string& assumption() const noexcept { return assumption_; }
  [[nodiscard]] const std::string& quote_key() const noexcept { return quote_key_; }

 private:
  std::string assumption_;
  std::string quote_key_;
};

}  // namespace driftbound
