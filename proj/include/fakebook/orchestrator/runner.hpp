#pragma once

#include "fakebook/fixture/fixture.hpp"
#include "fakebook/orchestrator/schedule.hpp"
#include "fakebook/orchestrator/treatment.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <vector>

namespace fakebook {

/// Where the runner sends bot actions. Implemented by the platform.
class ActionSink {
public:
    virtual ~ActionSink() = default;
    virtual PostId create_bot_post(const Experiment& experiment, const PlannedPost& plan, Instant at) = 0;
    virtual void apply_bot_like(const Experiment& experiment, int bot_index, const PostId& target, Instant at) = 0;
};

/// Everything a runner needs to resume after a restart.
struct RunnerState {
    Experiment experiment;
    std::vector<ScheduledEvent> events;
    TreatmentLedger ledger;
    std::map<std::string, PostId> plan_posts;   // fixture post plan -> created post
    std::map<int, PostId> participant_day_posts; // first participant post per study day
    std::optional<Instant> high_water;           // latest tick time seen
};

/// Executes one experiment's schedule. All methods are mutually exclusive per
/// runner; different runners are independent.
class ExperimentRunner {
public:
    ExperimentRunner(Experiment experiment, ValidatedFixture fixture, GrantPolicy policy = {});
    ExperimentRunner(RunnerState state, ValidatedFixture fixture, GrantPolicy policy = {});

    ExperimentRunner(const ExperimentRunner&) = delete;
    ExperimentRunner& operator=(const ExperimentRunner&) = delete;

    /// Runs every pending event due at or before `now`, in execution order,
    /// and returns those that completed. A `now` earlier than one already
    /// seen executes nothing. Failed events stay pending with a note.
    std::vector<ScheduledEvent> tick(Instant now, ActionSink& sink);

    /// Grants treatment likes for a new participant post and binds planned
    /// fixture likes waiting for that post's study day. Returns the new or
    /// newly bound events.
    std::vector<ScheduledEvent> on_participant_post(const Post& post);

    Experiment experiment() const;
    TreatmentLedger ledger() const;
    std::vector<ScheduledEvent> events() const;
    RunnerState snapshot() const;
    const ValidatedFixture& fixture() const noexcept { return fixture_; }

private:
    void advance_state(Instant now);
    bool execute(ScheduledEvent& event, ActionSink& sink);

    mutable std::mutex mutex_;
    RunnerState state_;
    ValidatedFixture fixture_;
    GrantPolicy policy_;
};

}  // namespace fakebook
