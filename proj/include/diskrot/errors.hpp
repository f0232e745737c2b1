#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diskrot {

enum class ErrorKind {
    ZeroPoint,
    BadInterval,
    CoincidentPoints,
    RefinementExhausted,
    SingularJacobian,
    OrbitCollision,
    QuadratureFailure,
    StepTooCoarse,
    SamePoint,
    TailNotCertified,
    OrbitEscapesCompact,
    RationalInput,
    FoliationNotTransverse,
    CertificateFailed,
    SchemaError,
    InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ZeroPoint: return "ZeroPoint";
        case ErrorKind::BadInterval: return "BadInterval";
        case ErrorKind::CoincidentPoints: return "CoincidentPoints";
        case ErrorKind::RefinementExhausted: return "RefinementExhausted";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::OrbitCollision: return "OrbitCollision";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::StepTooCoarse: return "StepTooCoarse";
        case ErrorKind::SamePoint: return "SamePoint";
        case ErrorKind::TailNotCertified: return "TailNotCertified";
        case ErrorKind::OrbitEscapesCompact: return "OrbitEscapesCompact";
        case ErrorKind::RationalInput: return "RationalInput";
        case ErrorKind::FoliationNotTransverse: return "FoliationNotTransverse";
        case ErrorKind::CertificateFailed: return "CertificateFailed";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace diskrot
