#ifndef EXPANDERLAB_ERROR_HPP_
#define EXPANDERLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace expanderlab {

enum class ErrorCode {
  kNonPrimeModulus,
  kMissingModulus,
  kDivisionByZero,
  kContextMismatch,
  kParseError,
  kZeroDilation,
  kZeroElementPresent,
  kTOutOfRange,
  kPrecisionCapExceeded,
  kZeroTwist,
  kEpsilonOutOfRange,
  kGraphTooSparse,
  kCollisionFound,
  kBudgetExceeded,
  kDuplicateInput,
  kFieldMismatch,
  kWitnessFailure,
  kUnknownRelation,
  kSideConditionViolated,
  kSetTooSmall,
  kDensityViolated,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace expanderlab

#endif  // EXPANDERLAB_ERROR_HPP_
