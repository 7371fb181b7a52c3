#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Graph construction and surgery.
struct InvalidVertexId : Error { using Error::Error; };
struct EmptyEdgeList : Error { using Error::Error; };
struct DisconnectedGraph : Error { using Error::Error; };
struct ContractAllEdges : Error { using Error::Error; };
struct EnumerationBudgetExceeded : Error { using Error::Error; };

// Generic precondition breach not covered by a dedicated class.
struct InvalidInput : Error { using Error::Error; };

// Secular system evaluation.
struct DimensionMismatch : Error { using Error::Error; };
struct PointSingular : Error { using Error::Error; };
struct NormalNotInCone : Error { using Error::Error; };

// Spectrum solver.
struct StepTooCoarse : Error { using Error::Error; };
struct ToleranceNotReached : Error { using Error::Error; };
struct NotOnManifold : Error { using Error::Error; };
struct NullSpaceIllConditioned : Error { using Error::Error; };
struct DegenerateEigenvalue : Error { using Error::Error; };

// Measures and averaging.
struct ZeroMeasure : Error { using Error::Error; };
struct SpectrumSolveFailed : Error { using Error::Error; };
struct RationalLengths : Error { using Error::Error; };
struct InvalidSupport : Error { using Error::Error; };

// Markov chain utilities.
struct NotConverged : Error { using Error::Error; };

// Unit-length bookkeeping.
struct CountMismatch : Error { using Error::Error; };

// File and format handling.
struct FileNotFound : Error { using Error::Error; };
struct MalformedGraphJson : Error { using Error::Error; };

}  // namespace qgraph
