#include "anchormatch/error.hpp"

namespace anchormatch {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NegativeTime: return "NegativeTime";
    case Errc::AllZeroSpectrum: return "AllZeroSpectrum";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NegativeQuadraticForm: return "NegativeQuadraticForm";
    case Errc::NonPositiveSigma: return "NonPositiveSigma";
    case Errc::EmptyAnchorSet: return "EmptyAnchorSet";
    case Errc::DuplicateAnchor: return "DuplicateAnchor";
    case Errc::SameNode: return "SameNode";
    case Errc::QPNumericalFailure: return "QPNumericalFailure";
    case Errc::ConflictingPair: return "ConflictingPair";
    case Errc::MissingProximityMatrix: return "MissingProximityMatrix";
    case Errc::ZeroMatrix: return "ZeroMatrix";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::TooManyAnchors: return "TooManyAnchors";
    case Errc::DuplicatePoints: return "DuplicatePoints";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::InconsistentPointSets: return "InconsistentPointSets";
  }
  return "Unknown";
}

}  // namespace anchormatch
