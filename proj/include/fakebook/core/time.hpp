#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fakebook {

using Duration = std::chrono::milliseconds;
using Instant = std::chrono::sys_time<Duration>;

inline constexpr std::chrono::seconds kDay{86400};

/// ISO-8601 UTC with millisecond precision, e.g. `2026-03-02T09:00:00.000Z`.
std::string format_instant(Instant t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff]Z`.
std::optional<Instant> parse_instant(std::string_view text);

inline std::int64_t to_millis(Instant t) { return t.time_since_epoch().count(); }
inline Instant from_millis(std::int64_t ms) { return Instant{Duration{ms}}; }

class Clock {
public:
    virtual ~Clock() = default;
    virtual Instant now() const = 0;
};

class SystemClock final : public Clock {
public:
    Instant now() const override;
};

/// Manually driven clock for simulations and tests. Never moves backwards.
class VirtualClock final : public Clock {
public:
    explicit VirtualClock(Instant start) : ms_(to_millis(start)) {}

    Instant now() const override { return from_millis(ms_.load()); }

    void advance(Duration by);
    void set(Instant t);

private:
    std::atomic<std::int64_t> ms_;
};

}  // namespace fakebook
