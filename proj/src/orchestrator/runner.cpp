#include "fakebook/orchestrator/runner.hpp"

#include "fakebook/core/error.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace fakebook {

ExperimentRunner::ExperimentRunner(Experiment experiment, ValidatedFixture fixture, GrantPolicy policy)
    : fixture_(std::move(fixture)), policy_(std::move(policy)) {
    state_.events = materialize_schedule(experiment, fixture_);
    state_.ledger.experiment_id = experiment.experiment_id;
    state_.ledger.condition = experiment.condition;
    state_.experiment = std::move(experiment);
}

ExperimentRunner::ExperimentRunner(RunnerState state, ValidatedFixture fixture, GrantPolicy policy)
    : state_(std::move(state)), fixture_(std::move(fixture)), policy_(std::move(policy)) {}

void ExperimentRunner::advance_state(Instant now) {
    auto& exp = state_.experiment;
    if (exp.state == ExperimentState::created && now >= exp.start_instant) exp.state = ExperimentState::running;
    if (exp.state == ExperimentState::running && now >= exp.day_begin(exp.wrapup_day + 1))
        exp.state = ExperimentState::finished;
}

bool ExperimentRunner::execute(ScheduledEvent& event, ActionSink& sink) {
    const auto& exp = state_.experiment;
    try {
        if (event.action == ActionKind::create_bot_post) {
            const auto* plan = fixture_.find_post(event.plan_id);
            if (!plan) fail(ErrorCode::internal, fmt::format("unknown post plan '{}'", event.plan_id));
            state_.plan_posts[event.plan_id] = sink.create_bot_post(exp, *plan, *event.due_at);
        } else {
            std::optional<PostId> target = event.target_post;
            if (!target) {
                const auto* like = fixture_.find_like(event.plan_id);
                if (!like) fail(ErrorCode::internal, fmt::format("unknown like plan '{}'", event.plan_id));
                const auto& plan_target = std::get<BotPostTarget>(like->target).plan_id;
                auto it = state_.plan_posts.find(plan_target);
                if (it == state_.plan_posts.end())
                    fail(ErrorCode::not_found, fmt::format("target post '{}' does not exist yet", plan_target));
                target = it->second;
            }
            sink.apply_bot_like(exp, event.bot_index, *target, *event.due_at);
        }
    } catch (const std::exception& e) {
        event.note = e.what();
        return false;
    }
    event.status = EventStatus::done;
    event.note.clear();
    return true;
}

std::vector<ScheduledEvent> ExperimentRunner::tick(Instant now, ActionSink& sink) {
    std::lock_guard lock(mutex_);
    if (state_.high_water && now < *state_.high_water) return {};
    state_.high_water = now;
    advance_state(now);

    std::vector<ScheduledEvent*> due;
    for (auto& e : state_.events)
        if (e.status == EventStatus::pending && e.due_at && *e.due_at <= now) due.push_back(&e);
    std::sort(due.begin(), due.end(), [](const auto* a, const auto* b) { return execution_order(*a, *b); });

    std::vector<ScheduledEvent> executed;
    for (auto* e : due)
        if (execute(*e, sink)) executed.push_back(*e);
    return executed;
}

std::vector<ScheduledEvent> ExperimentRunner::on_participant_post(const Post& post) {
    std::lock_guard lock(mutex_);
    const auto& exp = state_.experiment;
    auto changed = grant_likes_for_participant_post(exp, post, state_.ledger, policy_);
    state_.events.insert(state_.events.end(), changed.begin(), changed.end());

    const int day = exp.day_of(post.created_at);
    if (day >= 1 && day <= exp.day_count && !state_.participant_day_posts.contains(day)) {
        state_.participant_day_posts.emplace(day, post.post_id);
        for (auto& e : state_.events) {
            if (e.status != EventStatus::pending || !e.deferred() || e.target_day != day) continue;
            const auto* like = fixture_.find_like(e.plan_id);
            if (like && admit_planned_participant_like(state_.ledger, post.post_id, e.bot_index)) {
                e.target_post = post.post_id;
                e.due_at = post.created_at + like->delay;
            } else {
                e.status = EventStatus::skipped;
                e.note = fmt::format("{} limits leave no room for this like", to_string(exp.condition));
            }
            changed.push_back(e);
        }
    }
    return changed;
}

Experiment ExperimentRunner::experiment() const {
    std::lock_guard lock(mutex_);
    return state_.experiment;
}

TreatmentLedger ExperimentRunner::ledger() const {
    std::lock_guard lock(mutex_);
    return state_.ledger;
}

std::vector<ScheduledEvent> ExperimentRunner::events() const {
    std::lock_guard lock(mutex_);
    return state_.events;
}

RunnerState ExperimentRunner::snapshot() const {
    std::lock_guard lock(mutex_);
    return state_;
}

}  // namespace fakebook
