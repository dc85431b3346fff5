#pragma once

#include "fakebook/core/ids.hpp"
#include "fakebook/core/time.hpp"

#include <cstdint>
#include <optional>

namespace fakebook {

struct Session {
    SessionId session_id;
    AccountId account_id;
    Instant started_at{};
    std::optional<Instant> ended_at;
    /// Time of the latest authenticated request.
    Instant last_seen{};
    std::string token_digest;

    bool open() const noexcept { return !ended_at.has_value(); }
};

struct ViewEvent {
    std::string view_id;
    SessionId session_id;
    PostId post_id;
    std::int64_t duration_ms = 0;
    Instant recorded_at{};
};

struct AdClickEvent {
    std::string click_id;
    SessionId session_id;
    AdId ad_id;
    Instant clicked_at{};
};

}  // namespace fakebook
