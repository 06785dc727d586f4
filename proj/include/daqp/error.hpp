#ifndef DAQP__ERROR_HPP_
#define DAQP__ERROR_HPP_

/**
 * @file
 * @brief Error type shared by the factorization, transformation and I/O layers.
 */

#include <stdexcept>
#include <string>
#include <string_view>

namespace daqp {

/// Failure categories raised as exceptions. Solver outcomes are reported via SolveStatus instead.
enum class ErrorCode {
  NotSymmetric,
  IndefiniteMatrix,
  SingularBase,
  NegativePivot,
  IndexOutOfRange,
  SingularFactor,
  NotSingular,
  NotPositiveDefinite,
  TriviallyInfeasible,
  DimensionMismatch,
  InvalidWarmStart,
  InvalidSettings,
  BadMagic,
  MissingSection,
  ParseError,
  NoFeasibleCandidate,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
  case ErrorCode::NotSymmetric: return "NotSymmetric";
  case ErrorCode::IndefiniteMatrix: return "IndefiniteMatrix";
  case ErrorCode::SingularBase: return "SingularBase";
  case ErrorCode::NegativePivot: return "NegativePivot";
  case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::SingularFactor: return "SingularFactor";
  case ErrorCode::NotSingular: return "NotSingular";
  case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
  case ErrorCode::TriviallyInfeasible: return "TriviallyInfeasible";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::InvalidWarmStart: return "InvalidWarmStart";
  case ErrorCode::InvalidSettings: return "InvalidSettings";
  case ErrorCode::BadMagic: return "BadMagic";
  case ErrorCode::MissingSection: return "MissingSection";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::NoFeasibleCandidate: return "NoFeasibleCandidate";
  }
  return "Unknown";
}

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
  {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace daqp

#endif  // DAQP__ERROR_HPP_
