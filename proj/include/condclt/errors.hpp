#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace condclt {

enum class ErrorCode {
  // parameter / configuration problems
  InvalidParameter,
  DimensionMismatch,
  InvalidLambda,
  InvalidA,
  TooManyEdges,
  DuplicateEdge,
  SelfLoop,
  OutOfDeskRange,
  ArityMismatch,
  InsufficientReplicates,
  // numeric problems
  SingularYBlock,
  SingularTransform,
  InvalidCovariance,
  TruncationError,
  DegenerateVariance,
  // outcome signals
  NotComparable,
  NoDifferenceFound,
  Io,
};

std::string_view to_string(ErrorCode code);

/// True for codes caused by bad inputs rather than numerical breakdown.
bool is_parameter_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace condclt
