#include "condclt/errors.hpp"

namespace condclt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidA: return "InvalidA";
    case ErrorCode::TooManyEdges: return "TooManyEdges";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::OutOfDeskRange: return "OutOfDeskRange";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InsufficientReplicates: return "InsufficientReplicates";
    case ErrorCode::SingularYBlock: return "SingularYBlock";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::InvalidCovariance: return "InvalidCovariance";
    case ErrorCode::TruncationError: return "TruncationError";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::NotComparable: return "NotComparable";
    case ErrorCode::NoDifferenceFound: return "NoDifferenceFound";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_parameter_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidLambda:
    case ErrorCode::InvalidA:
    case ErrorCode::TooManyEdges:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::SelfLoop:
    case ErrorCode::OutOfDeskRange:
    case ErrorCode::ArityMismatch:
    case ErrorCode::InsufficientReplicates:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace condclt
