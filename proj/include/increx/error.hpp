#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace increx {

enum class ErrorKind {
  ToleranceNotMet,
  NotFactorizable,
  ConditionViolated,
  SingularFactor,
  DomainError,
  NoValidStationaryPoint,
  TruncationUnstable,
  MomentInfeasible,
  FixedPointDiverged,
  InfeasibleBounds,
  DivergentIntegrand,
  DegenerateXY,
  HorizonExceeded,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::NotFactorizable: return "NotFactorizable";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::SingularFactor: return "SingularFactor";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NoValidStationaryPoint: return "NoValidStationaryPoint";
    case ErrorKind::TruncationUnstable: return "TruncationUnstable";
    case ErrorKind::MomentInfeasible: return "MomentInfeasible";
    case ErrorKind::FixedPointDiverged: return "FixedPointDiverged";
    case ErrorKind::InfeasibleBounds: return "InfeasibleBounds";
    case ErrorKind::DivergentIntegrand: return "DivergentIntegrand";
    case ErrorKind::DegenerateXY: return "DegenerateXY";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Compact rendering of a number for error messages.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace increx
