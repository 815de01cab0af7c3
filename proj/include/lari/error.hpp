#pragma once

#include <stdexcept>
#include <string>

namespace lari {

enum class ErrorCode {
    EmptyMesh,
    IndexOutOfRange,
    ShapeMismatch,
    NonFiniteLogits,
    DegenerateSystem,
    DegenerateCovariance,
    EmptyCloud,
    EmptyRegion,
    EmptyCorpus,
    ParseError,
    UnsupportedFormat,
    CorruptHeader,
    TruncatedFile,
    VersionMismatch,
    InvalidRotation,
    InvalidArgument,
    IoError,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyMesh: return "EmptyMesh";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteLogits: return "NonFiniteLogits";
        case ErrorCode::DegenerateSystem: return "DegenerateSystem";
        case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
        case ErrorCode::EmptyCloud: return "EmptyCloud";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::CorruptHeader: return "CorruptHeader";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::InvalidRotation: return "InvalidRotation";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Exception carrying a structured error code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lari
