#include "schuriter/error.hpp"

namespace schuriter {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kIndefiniteBeyondTolerance: return "IndefiniteBeyondTolerance";
    case ErrorCode::kAmbientMismatch: return "AmbientMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotContraction: return "NotContraction";
    case ErrorCode::kNotCnu: return "NotCNU";
    case ErrorCode::kNotUnitary: return "NotUnitary";
    case ErrorCode::kSingularPencil: return "SingularPencil";
    case ErrorCode::kOutsideDisk: return "OutsideDisk";
    case ErrorCode::kNotSimpleConservative: return "NotSimpleConservative";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kUnitaryParameter: return "UnitaryParameter";
    case ErrorCode::kInvalidSequence: return "InvalidSequence";
    case ErrorCode::kRangeInclusionViolated: return "RangeInclusionViolated";
    case ErrorCode::kUnitaryTheta0: return "UnitaryTheta0";
    case ErrorCode::kTerminated: return "Terminated";
    case ErrorCode::kInvalidTolerance: return "InvalidTolerance";
  }
  return "Unknown";
}

}  // namespace schuriter
