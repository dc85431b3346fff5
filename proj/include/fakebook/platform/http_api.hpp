#pragma once

#include "fakebook/core/error.hpp"
#include "fakebook/core/time.hpp"
#include "fakebook/platform/platform.hpp"

#include <functional>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace fakebook {

/// Deployment settings read from FAKEBOOK_* environment variables.
struct ServerConfig {
    std::string bind = "127.0.0.1";   // FAKEBOOK_BIND
    int port = 8080;                  // FAKEBOOK_PORT
    std::string db = "fakebook.db";   // FAKEBOOK_DB; ":memory:" keeps nothing
    std::string admin_user = "admin"; // FAKEBOOK_ADMIN_USER
    std::string admin_password;       // FAKEBOOK_ADMIN_PASSWORD
    bool virtual_clock = false;       // FAKEBOOK_VIRTUAL_CLOCK=1
    std::optional<Instant> virtual_start;  // FAKEBOOK_VIRTUAL_START (ISO-8601)
    int password_iterations = credentials::kDefaultIterations;  // FAKEBOOK_PBKDF2_ITERATIONS

    /// `lookup` returns the variable's value or nullptr. Throws validation on
    /// malformed values.
    static ServerConfig from_env(const std::function<const char*(const char*)>& lookup);
};

/// Registers the JSON API on `server`. `virtual_clock` enables
/// /admin/clock/advance; pass nullptr in production.
void mount_api(httplib::Server& server, Platform& platform, VirtualClock* virtual_clock = nullptr);

/// HTTP status for an error code.
int http_status(ErrorCode code) noexcept;

}  // namespace fakebook
