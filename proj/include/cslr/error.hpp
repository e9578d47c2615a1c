#pragma once

#include <stdexcept>
#include <string>

namespace cslr {

enum class ErrorCode {
    InvalidArgument = 1,
    DimensionMismatch,
    NoCrossing,
    BracketInvalid,
    AllExcluded,
    SingularMatrix,
    DivergentIntegral,
    AllFailed,
    UnsupportedModel,
    Io,
};

const char* error_code_name(ErrorCode code) noexcept;

// All library failures are reported through this exception; the C API maps
// `code()` onto its integer status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cslr
