#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsectl {

enum class ErrorCode {
  kInvalidInput,
  kDimensionError,
  kNonConvergence,
  kZeroVector,
  kRepeatedEigenvalues,
  kTooLarge,
  kInfeasible,
  kNotControllable,
  kNoCandidate,
  kNoProgress,
  kGenerationFailed,
  kBudgetExhausted,
  kOracleDisagreement,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kDimensionError: return "DimensionError";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kRepeatedEigenvalues: return "RepeatedEigenvalues";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kNotControllable: return "NotControllable";
    case ErrorCode::kNoCandidate: return "NoCandidate";
    case ErrorCode::kNoProgress: return "NoProgress";
    case ErrorCode::kGenerationFailed: return "GenerationFailed";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kOracleDisagreement: return "OracleDisagreement";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library.
///
/// `witness()` carries the 1-based eigen index that certifies an Infeasible or
/// NotControllable outcome, when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<int> witness = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        witness_(witness) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<int>& witness() const noexcept { return witness_; }

 private:
  ErrorCode code_;
  std::optional<int> witness_;
};

}  // namespace sparsectl
