#pragma once

#include <stdexcept>
#include <string>

namespace flexgate {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// mesh validation
struct NonManifoldEdge : Error { using Error::Error; };
struct NonTriangleFace : Error { using Error::Error; };
struct DanglingVertex : Error { using Error::Error; };
struct NotOrientable : Error { using Error::Error; };
struct DegenerateFace : Error { using Error::Error; };
struct DegenerateVertexSet : Error { using Error::Error; };

// edge geometry
struct BranchUndefined : Error { using Error::Error; };
struct BothBranchesUndefined : Error { using Error::Error; };

// flexes
struct NotAFirstOrderFlex : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };

// Dehn conditions
struct DecompositionFailed : Error { using Error::Error; };
struct TheoremHypothesisViolated : Error { using Error::Error; };

// minors
struct IndexOutOfRange : Error { using Error::Error; };
struct EnumerationTooLarge : Error { using Error::Error; };

// oracle
struct ContinuationStalled : Error { using Error::Error; };
struct KernelCollapse : Error { using Error::Error; };
struct AngleUnwrapFailure : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct UnknownExample : Error { using Error::Error; };

// io
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace flexgate
