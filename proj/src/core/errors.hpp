#ifndef SNAPDOP_CORE_ERRORS_HPP
#define SNAPDOP_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace snapdop {

// Stable error codes shared by the C++ core and the C API surface.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument,
    ChecksumMismatch,
    MalformedLine,
    PropagationDiverged,
    StaleEpoch,
    DeepSpaceUnsupported,
    DegenerateInput,
    DegenerateGeometry,
    SchemaMismatch,
    RowParseError,
    InvariantViolation,
    NoCandidate,
    AmbiguousMatch,
    MissingEphemeris,
    UnknownBasePosition,
    UnmatchedObservation,
    OutOfCoverage,
    NoCommonSatellite,
    NoCrossing,
    InsufficientData,
    SingularNormalMatrix,
    EmptyInput,
    InsufficientCommonVisibility,
    ConfigError,
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code);

class SnapdopError : public std::runtime_error {
public:
    SnapdopError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw SnapdopError(code, message);
}

}  // namespace snapdop

#endif
