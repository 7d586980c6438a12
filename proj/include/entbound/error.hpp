#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entbound {

enum class ErrorKind {
    // probdist
    NonUnitMass,
    NegativeProbability,
    UnknownSymbol,
    UnknownVariable,
    DuplicateOutcome,
    GroundSetTooLarge,
    OutOfRange,
    InvalidMeasure,
    // partitions
    SupportTooLarge,
    SupportTooSmall,
    PropertyViolation,
    InconsistentOracle,
    NonDistribution,
    NonFactorizableCoordinates,
    // polycone
    NumIterationsExceeded,
    DimensionMismatch,
    MalformedProgram,
    // netmodel
    CyclicGraph,
    NonPositiveCapacity,
    SourceDemandOverlap,
    DanglingReference,
    InvalidEntropyTable,
    MissingTableEntry,
    AlphabetMismatch,
    // auxgen
    DependentBasisVectors,
    SpanDeficient,
    SearchSpaceTooLarge,
    // io
    ParseError,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonUnitMass: return "NonUnitMass";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::DuplicateOutcome: return "DuplicateOutcome";
    case ErrorKind::GroundSetTooLarge: return "GroundSetTooLarge";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::SupportTooLarge: return "SupportTooLarge";
    case ErrorKind::SupportTooSmall: return "SupportTooSmall";
    case ErrorKind::PropertyViolation: return "PropertyViolation";
    case ErrorKind::InconsistentOracle: return "InconsistentOracle";
    case ErrorKind::NonDistribution: return "NonDistribution";
    case ErrorKind::NonFactorizableCoordinates: return "NonFactorizableCoordinates";
    case ErrorKind::NumIterationsExceeded: return "NumIterationsExceeded";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MalformedProgram: return "MalformedProgram";
    case ErrorKind::CyclicGraph: return "CyclicGraph";
    case ErrorKind::NonPositiveCapacity: return "NonPositiveCapacity";
    case ErrorKind::SourceDemandOverlap: return "SourceDemandOverlap";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::InvalidEntropyTable: return "InvalidEntropyTable";
    case ErrorKind::MissingTableEntry: return "MissingTableEntry";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::DependentBasisVectors: return "DependentBasisVectors";
    case ErrorKind::SpanDeficient: return "SpanDeficient";
    case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace entbound
