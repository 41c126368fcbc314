#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgdirac {

/// Failure categories raised by the library. Every thrown qgdirac::Error
/// carries one of these so callers (and the CLI) can branch on it.
enum class ErrorCode {
  EmptyCompactCore,
  Disconnected,
  DanglingEndpoint,
  InvalidGraphSpec,
  SpacingTooCoarse,
  RankDeficiency,
  DimensionMismatch,
  EigFailure,
  NoDecay,
  FlowStagnation,
  ConcavityLoss,
  NewtonDivergence,
  GapViolation,
  DomainError,
  PreconditionViolated,
  BoundViolated,
  DegenerateInput,
  EmptySweep,
  InsufficientData,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qgdirac
