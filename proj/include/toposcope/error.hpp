#pragma once

#include <stdexcept>
#include <string>

namespace toposcope {

enum class ErrorCode {
    InvalidInput,
    DegenerateChannel,
    InvalidFiltration,
    SchemaError,
    NotFound,
    Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code so the C API can map it
// onto a stable status value. `param` names the offending parameter when one
// is known (used by the HTTP layer for 400 responses).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string param = {})
        : std::runtime_error(message), code_(code), param_(std::move(param)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& param() const noexcept { return param_; }

private:
    ErrorCode code_;
    std::string param_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message, std::string param = {})
{
    throw Error(code, message, std::move(param));
}

} // namespace toposcope
