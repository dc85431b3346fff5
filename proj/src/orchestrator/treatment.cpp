#include "fakebook/orchestrator/treatment.hpp"

#include "fakebook/core/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace fakebook {

GrantPattern::GrantPattern(std::vector<int> grants) : grants_(std::move(grants)) {
    for (int g : grants_)
        if (g < kMinPerPost || g > kMaxPerPost)
            fail(ErrorCode::validation, fmt::format("grant {} outside [{}, {}]", g, kMinPerPost, kMaxPerPost));
    if (std::accumulate(grants_.begin(), grants_.end(), 0) != kTotal)
        fail(ErrorCode::validation, fmt::format("grant pattern must sum to {}", kTotal));
}

GrantPattern GrantPattern::standard() { return GrantPattern({5, 5, 5, 5, 4}); }

int GrantPattern::grant_for(std::size_t ordinal) const noexcept {
    return ordinal < grants_.size() ? grants_[ordinal] : 0;
}

const PostGrant* TreatmentLedger::find(const PostId& post) const noexcept {
    auto it = std::find_if(per_post_grants.begin(), per_post_grants.end(),
                           [&](const PostGrant& g) { return g.post_id == post; });
    return it == per_post_grants.end() ? nullptr : &*it;
}

bool TreatmentLedger::invariants_hold() const noexcept {
    int sum = 0;
    for (const auto& g : per_post_grants) {
        if (static_cast<int>(g.actor_bot_indices.size()) != g.granted) return false;
        if (std::set<int>(g.actor_bot_indices.begin(), g.actor_bot_indices.end()).size() !=
            g.actor_bot_indices.size())
            return false;
        sum += g.granted;
    }
    if (sum != total_granted) return false;

    if (condition == Condition::many_likes) {
        for (const auto& g : per_post_grants)
            if (g.granted < GrantPattern::kMinPerPost || g.granted > GrantPattern::kMaxPerPost) return false;
        return total_granted <= GrantPattern::kTotal;
    }
    if (total_granted > 1) return false;
    return per_post_grants.empty() || (first_post && per_post_grants.front().post_id == *first_post);
}

std::vector<ScheduledEvent> grant_likes_for_participant_post(const Experiment& experiment, const Post& post,
                                                             TreatmentLedger& ledger, const GrantPolicy& policy) {
    if (post.author_id != experiment.participant_id)
        fail(ErrorCode::forbidden, fmt::format("post '{}' is not by the experiment's participant", post.post_id.str()));
    if (ledger.experiment_id != experiment.experiment_id || ledger.condition != experiment.condition)
        fail(ErrorCode::conflict, "treatment ledger belongs to a different experiment");
    if (ledger.find(post.post_id) || (ledger.first_post && *ledger.first_post == post.post_id))
        fail(ErrorCode::conflict, fmt::format("post '{}' was already granted", post.post_id.str()));

    const auto ordinal = static_cast<std::size_t>(ledger.posts_seen);
    int granted = 0;
    std::vector<int> actors;
    int cursor = ledger.roster_cursor;
    if (experiment.condition == Condition::many_likes) {
        granted = policy.pattern.grant_for(ordinal);
        for (int i = 0; i < granted; ++i) actors.push_back((cursor + i) % kBotCount + 1);
        cursor = (cursor + granted) % kBotCount;
    } else if (ordinal == 0) {
        granted = 1;
        actors.push_back(1);
    }

    if (std::set<int>(actors.begin(), actors.end()).size() != actors.size())
        fail(ErrorCode::internal, "grant actors must be distinct");

    TreatmentLedger next = ledger;
    ++next.posts_seen;
    if (!next.first_post) next.first_post = post.post_id;
    next.roster_cursor = cursor;
    if (granted > 0) {
        next.per_post_grants.push_back({post.post_id, granted, actors});
        next.total_granted += granted;
    }
    if (!next.invariants_hold())
        fail(ErrorCode::conflict, fmt::format("granting {} likes on '{}' would violate the {} protocol", granted,
                                              post.post_id.str(), to_string(experiment.condition)));
    ledger = std::move(next);

    std::vector<ScheduledEvent> events;
    const auto end = experiment.study_end();
    const auto span = policy.max_delay - policy.min_delay;
    for (int i = 0; i < granted; ++i) {
        auto delay = policy.min_delay;
        if (granted > 1) delay += span * i / (granted - 1);
        auto due = std::max(post.created_at, std::min(post.created_at + delay, end));

        ScheduledEvent e;
        e.event_id = EventId{fmt::format("{}/g{:02d}-{}", experiment.experiment_id.str(), ordinal + 1, i + 1)};
        e.experiment_id = experiment.experiment_id;
        e.due_at = due;
        e.action = ActionKind::apply_bot_like;
        e.bot_index = actors[i];
        e.target_post = post.post_id;
        e.source = LikeSource::treatment_grant;
        events.push_back(std::move(e));
    }
    return events;
}

bool admit_planned_participant_like(TreatmentLedger& ledger, const PostId& post, int actor_bot_index) {
    TreatmentLedger next = ledger;
    if (ledger.condition == Condition::many_likes) {
        auto it = std::find_if(next.per_post_grants.begin(), next.per_post_grants.end(),
                               [&](const PostGrant& g) { return g.post_id == post; });
        if (it == next.per_post_grants.end()) return false;
        auto& actors = it->actor_bot_indices;
        if (std::find(actors.begin(), actors.end(), actor_bot_index) != actors.end()) return false;
        actors.push_back(actor_bot_index);
        ++it->granted;
        ++next.total_granted;
    } else {
        if (!next.first_post || *next.first_post != post || next.find(post)) return false;
        next.per_post_grants.push_back({post, 1, {actor_bot_index}});
        next.total_granted += 1;
    }
    if (!next.invariants_hold()) return false;
    ledger = std::move(next);
    return true;
}

}  // namespace fakebook
