#include "fakebook/orchestrator/schedule.hpp"

#include "fakebook/core/error.hpp"

#include <array>
#include <map>

#include <fmt/format.h>

namespace fakebook {

std::string_view to_string(ActionKind v) noexcept {
    return v == ActionKind::create_bot_post ? "CREATE_BOT_POST" : "APPLY_BOT_LIKE";
}

std::string_view to_string(EventStatus v) noexcept {
    switch (v) {
        case EventStatus::pending: return "PENDING";
        case EventStatus::done: return "DONE";
        case EventStatus::skipped: return "SKIPPED";
    }
    return "";
}

std::string_view to_string(LikeSource v) noexcept {
    return v == LikeSource::fixture_plan ? "FIXTURE_PLAN" : "TREATMENT_GRANT";
}

namespace {

template <class Enum, std::size_t N>
Enum parse_from(std::string_view s, const std::array<Enum, N>& values, std::string_view what) {
    for (auto v : values)
        if (to_string(v) == s) return v;
    fail(ErrorCode::validation, fmt::format("unknown {} '{}'", what, s));
}

}  // namespace

ActionKind parse_action_kind(std::string_view s) {
    return parse_from(s, std::array{ActionKind::create_bot_post, ActionKind::apply_bot_like}, "action");
}
EventStatus parse_event_status(std::string_view s) {
    return parse_from(s, std::array{EventStatus::pending, EventStatus::done, EventStatus::skipped}, "event status");
}
LikeSource parse_like_source(std::string_view s) {
    return parse_from(s, std::array{LikeSource::fixture_plan, LikeSource::treatment_grant}, "like source");
}

bool execution_order(const ScheduledEvent& lhs, const ScheduledEvent& rhs) noexcept {
    if (lhs.due_at != rhs.due_at) return lhs.due_at < rhs.due_at;
    if (lhs.action != rhs.action) return lhs.action == ActionKind::create_bot_post;
    return lhs.event_id < rhs.event_id;
}

std::vector<ScheduledEvent> materialize_schedule(const Experiment& experiment, const ValidatedFixture& fixture) {
    if (experiment.state != ExperimentState::created)
        fail(ErrorCode::conflict, fmt::format("experiment '{}' is {}; schedules are materialized only before it runs",
                                              experiment.experiment_id.str(), to_string(experiment.state)));
    if (fixture.day_count() != experiment.day_count)
        fail(ErrorCode::validation, fmt::format("fixture validated for {} days but experiment runs {} days",
                                                fixture.day_count(), experiment.day_count));

    const auto& bundle = fixture.bundle();
    std::vector<ScheduledEvent> events;
    events.reserve(bundle.posts.size() + bundle.likes.size());
    auto next_id = [&] {
        return EventId{fmt::format("{}/e{:04d}", experiment.experiment_id.str(), events.size() + 1)};
    };

    std::map<std::string, Instant> post_due;
    for (const auto& p : bundle.posts) {
        ScheduledEvent e;
        e.event_id = next_id();
        e.experiment_id = experiment.experiment_id;
        e.due_at = experiment.start_instant + p.day_offset * kDay + p.time_offset;
        e.action = ActionKind::create_bot_post;
        e.plan_id = p.plan_id;
        e.bot_index = p.bot_index;
        post_due.emplace(p.plan_id, *e.due_at);
        events.push_back(std::move(e));
    }

    for (const auto& l : bundle.likes) {
        ScheduledEvent e;
        e.event_id = next_id();
        e.experiment_id = experiment.experiment_id;
        e.action = ActionKind::apply_bot_like;
        e.plan_id = l.plan_id;
        e.bot_index = l.actor_bot_index;
        if (const auto* target = std::get_if<BotPostTarget>(&l.target)) {
            e.due_at = post_due.at(target->plan_id) + l.delay;
        } else {
            e.target_day = std::get<ParticipantPostTarget>(l.target).day;
        }
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<DayWindow> day_schedule(const Experiment& experiment) {
    std::vector<DayWindow> days;
    for (int d = 1; d <= experiment.day_count; ++d)
        days.push_back({d, experiment.day_begin(d), experiment.day_begin(d + 1), false});
    days.push_back({experiment.wrapup_day, experiment.day_begin(experiment.wrapup_day),
                    experiment.day_begin(experiment.wrapup_day + 1), true});
    return days;
}

}  // namespace fakebook
