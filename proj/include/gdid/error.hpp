#ifndef GDID_ERROR_HPP_
#define GDID_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gdid {

enum class ErrorCode {
  // input / validation failures (CLI exit 2)
  MappingError,
  ParseError,
  EmptyDataError,
  MissingValue,
  DuplicateUnitId,
  ArityMismatch,
  DesignMismatch,
  DegenerateGroup,
  UnclassifiedDesign,
  UnsupportedDesign,
  ExtrapolationWarning,
  InvalidBounds,
  BoundsNotApplicable,
  EmptyCell,
  InsufficientPrePeriods,
  InvalidSpec,
  InvalidArgument,
  IoError,
  // numerical failures (CLI exit 3)
  NoConvergence,
  Separation,
  OneClass,
  RankDeficient,
  OverlapViolation,
  TooManyFailedReplicates,
};

std::string_view to_string(ErrorCode code);

// True for failures of a fitting or resampling procedure rather than of the input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt);

  ErrorCode code() const { return code_; }
  // 1-based data row (header excluded) for ParseError / MissingValue.
  std::optional<std::size_t> row() const { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace gdid

#endif  // GDID_ERROR_HPP_
