#pragma once

#include <stdexcept>
#include <string>

namespace isic {

// Error categories; mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    InvalidArgument,
    Parse,
    NotFound,
    Io,
    Provider,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::Parse: return "parse error";
        case ErrorCode::NotFound: return "not found";
        case ErrorCode::Io: return "io error";
        case ErrorCode::Provider: return "provider error";
        case ErrorCode::Internal: return "internal error";
    }
    return "unknown";
}

}  // namespace isic
