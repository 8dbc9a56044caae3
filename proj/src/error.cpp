#include "gdid/error.hpp"

namespace gdid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MappingError: return "MappingError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyDataError: return "EmptyDataError";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::DuplicateUnitId: return "DuplicateUnitId";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::DesignMismatch: return "DesignMismatch";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::UnclassifiedDesign: return "UnclassifiedDesign";
    case ErrorCode::UnsupportedDesign: return "UnsupportedDesign";
    case ErrorCode::ExtrapolationWarning: return "ExtrapolationWarning";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::BoundsNotApplicable: return "BoundsNotApplicable";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::InsufficientPrePeriods: return "InsufficientPrePeriods";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::OneClass: return "OneClass";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::OverlapViolation: return "OverlapViolation";
    case ErrorCode::TooManyFailedReplicates: return "TooManyFailedReplicates";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::Separation:
    case ErrorCode::OneClass:
    case ErrorCode::RankDeficient:
    case ErrorCode::OverlapViolation:
    case ErrorCode::TooManyFailedReplicates:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row)
    : std::runtime_error(message), code_(code), row_(row) {}

}  // namespace gdid
