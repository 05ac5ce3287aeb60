#pragma once

#include <stdexcept>
#include <string>

namespace dcp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonManifoldError : Error { using Error::Error; };
struct NonSimplicialError : Error { using Error::Error; };
struct NonOrientableError : Error { using Error::Error; };
struct FlavorMismatchError : Error { using Error::Error; };
struct ProductConditionViolatedError : Error { using Error::Error; };
struct DegenerateFaceError : Error { using Error::Error; };
struct VertexAtCenterError : Error { using Error::Error; };
struct NonPositiveLengthError : Error { using Error::Error; };
struct AngleOutOfRangeError : Error { using Error::Error; };
struct LinearSolveFailureError : Error { using Error::Error; };
struct NonDescentDirectionError : Error { using Error::Error; };
struct InfeasibleError : Error { using Error::Error; };
struct BrokenAtOptimumError : Error { using Error::Error; };
struct BrokenTriangleError : Error { using Error::Error; };
struct EarDetectedError : Error { using Error::Error; };
struct PolygonalInequalityError : Error { using Error::Error; };
struct InconsistentUError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct MissingEdgeLengthError : Error { using Error::Error; };
struct NonTriangleFaceError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace dcp
