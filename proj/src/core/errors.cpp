#include "core/errors.hpp"

namespace snapdop {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::PropagationDiverged: return "PropagationDiverged";
        case ErrorCode::StaleEpoch: return "StaleEpoch";
        case ErrorCode::DeepSpaceUnsupported: return "DeepSpaceUnsupported";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::RowParseError: return "RowParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::NoCandidate: return "NoCandidate";
        case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
        case ErrorCode::MissingEphemeris: return "MissingEphemeris";
        case ErrorCode::UnknownBasePosition: return "UnknownBasePosition";
        case ErrorCode::UnmatchedObservation: return "UnmatchedObservation";
        case ErrorCode::OutOfCoverage: return "OutOfCoverage";
        case ErrorCode::NoCommonSatellite: return "NoCommonSatellite";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::SingularNormalMatrix: return "SingularNormalMatrix";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InsufficientCommonVisibility: return "InsufficientCommonVisibility";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace snapdop
