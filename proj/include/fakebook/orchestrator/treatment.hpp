#pragma once

#include "fakebook/domain/model.hpp"
#include "fakebook/orchestrator/schedule.hpp"

#include <chrono>
#include <optional>
#include <vector>

namespace fakebook {

/// Like grants for successive participant posts in the many-likes condition.
/// Every entry is 4 or 5 and the entries sum to 24.
class GrantPattern {
public:
    static constexpr int kTotal = 24;
    static constexpr int kMinPerPost = 4;
    static constexpr int kMaxPerPost = 5;

    /// Throws validation when an entry is outside [4, 5] or the sum is not 24.
    explicit GrantPattern(std::vector<int> grants);

    /// [5, 5, 5, 5, 4]
    static GrantPattern standard();

    /// Grant for the participant's post with 0-based ordinal; 0 past the end.
    int grant_for(std::size_t ordinal) const noexcept;
    const std::vector<int>& grants() const noexcept { return grants_; }

private:
    std::vector<int> grants_;
};

struct PostGrant {
    PostId post_id;
    int granted = 0;
    std::vector<int> actor_bot_indices;

    friend bool operator==(const PostGrant&, const PostGrant&) = default;
};

/// Running account of bot likes granted to one participant.
struct TreatmentLedger {
    ExperimentId experiment_id;
    Condition condition = Condition::many_likes;
    /// Only posts that received at least one like appear here.
    std::vector<PostGrant> per_post_grants;
    int total_granted = 0;
    /// Participant posts seen so far, granted or not.
    int posts_seen = 0;
    std::optional<PostId> first_post;
    /// Next roster position (0-based) for round-robin actor selection.
    int roster_cursor = 0;

    const PostGrant* find(const PostId& post) const noexcept;

    /// Many-likes: every grant is 4 or 5 and the total is at most 24.
    /// Few-likes: at most one like in total, and only on the first post.
    bool invariants_hold() const noexcept;

    friend bool operator==(const TreatmentLedger&, const TreatmentLedger&) = default;
};

struct GrantPolicy {
    GrantPattern pattern = GrantPattern::standard();
    /// Grant likes on a post are spread evenly over [min_delay, max_delay]
    /// after its creation, capped at the end of the study.
    Duration min_delay = std::chrono::hours{1};
    Duration max_delay = std::chrono::hours{10};
};

/// Decides the bot likes a new participant post receives under the
/// experiment's condition, records them in the ledger and returns one
/// APPLY_BOT_LIKE event per like (possibly none).
///
/// Many-likes: the n-th post gets pattern[n] likes from distinct bots picked
/// round-robin over the roster; posts past the pattern get none. Few-likes:
/// the first post gets one like from bot 1, later posts get none.
///
/// Throws forbidden when the post is not the participant's, and conflict when
/// the post was already granted or a grant would break the ledger invariants
/// (the ledger is left untouched in that case).
std::vector<ScheduledEvent> grant_likes_for_participant_post(const Experiment& experiment, const Post& post,
                                                             TreatmentLedger& ledger,
                                                             const GrantPolicy& policy = {});

/// Admits one additional planned fixture like on a participant post if the
/// condition's limits allow it, and records it. Returns false otherwise.
bool admit_planned_participant_like(TreatmentLedger& ledger, const PostId& post, int actor_bot_index);

}  // namespace fakebook
