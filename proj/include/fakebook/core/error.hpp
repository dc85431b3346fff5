#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fakebook {

enum class ErrorCode {
    not_found,
    validation,
    auth,
    forbidden,
    conflict,
    schema,
    internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the library reports to callers is an Error carrying a code
/// that the HTTP layer maps onto a status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace fakebook
