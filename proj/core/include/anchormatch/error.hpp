#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anchormatch {

enum class Errc {
  // graph-core
  DuplicateEdge,
  IndexOutOfRange,
  NonPositiveWeight,
  NotSymmetric,
  ConvergenceFailure,
  NegativeTime,
  AllZeroSpectrum,
  // signatures
  KOutOfRange,
  DimensionMismatch,
  NegativeQuadraticForm,
  NonPositiveSigma,
  EmptyAnchorSet,
  DuplicateAnchor,
  // proximity learning
  SameNode,
  QPNumericalFailure,
  // matcher
  ConflictingPair,
  MissingProximityMatrix,
  ZeroMatrix,
  TooLarge,
  // bench
  InvalidSpec,
  TooManyAnchors,
  DuplicatePoints,
  // io
  ParseError,
  ValidationError,
  InconsistentPointSets,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace anchormatch
