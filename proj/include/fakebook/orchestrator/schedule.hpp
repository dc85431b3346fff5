#pragma once

#include "fakebook/domain/model.hpp"
#include "fakebook/fixture/fixture.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fakebook {

enum class ActionKind { create_bot_post, apply_bot_like };
enum class EventStatus { pending, done, skipped };
enum class LikeSource { fixture_plan, treatment_grant };

std::string_view to_string(ActionKind v) noexcept;
std::string_view to_string(EventStatus v) noexcept;
std::string_view to_string(LikeSource v) noexcept;
ActionKind parse_action_kind(std::string_view s);
EventStatus parse_event_status(std::string_view s);
LikeSource parse_like_source(std::string_view s);

struct ScheduledEvent {
    EventId event_id;
    ExperimentId experiment_id;
    /// Empty while a like on a participant post waits for that post to exist.
    std::optional<Instant> due_at;
    ActionKind action = ActionKind::create_bot_post;
    /// Fixture plan id of the post or like; empty for treatment grants.
    std::string plan_id;
    /// Author of a bot post or actor of a like (1-based roster index).
    int bot_index = 0;
    /// Concrete target for likes on participant posts, once bound.
    std::optional<PostId> target_post;
    /// Participant study day a deferred fixture like is waiting for.
    std::optional<int> target_day;
    LikeSource source = LikeSource::fixture_plan;
    EventStatus status = EventStatus::pending;
    /// Last execution failure or the reason for skipping.
    std::string note;

    bool deferred() const noexcept { return !due_at.has_value(); }

    friend bool operator==(const ScheduledEvent&, const ScheduledEvent&) = default;
};

/// Order in which due events execute: due time, then posts before likes,
/// then event id.
bool execution_order(const ScheduledEvent& lhs, const ScheduledEvent& rhs) noexcept;

/// Expands a validated fixture into absolute events for one experiment.
///
/// Bot posts land at start + day_offset days + time_offset. Likes on bot
/// posts land at their target's time plus the like's delay. Likes on
/// participant posts are deferred until the participant posts on that day.
/// Pure: identical inputs give identical event lists (ids included).
///
/// Throws conflict unless the experiment is still CREATED, and validation if
/// the fixture was validated for a different day count.
std::vector<ScheduledEvent> materialize_schedule(const Experiment& experiment, const ValidatedFixture& fixture);

/// Bounds of one study day, for reminder mailers and compliance.
struct DayWindow {
    int day = 0;
    Instant begin{};
    Instant end{};
    bool wrapup = false;
};

/// Days 1..day_count followed by the wrap-up day.
std::vector<DayWindow> day_schedule(const Experiment& experiment);

}  // namespace fakebook
