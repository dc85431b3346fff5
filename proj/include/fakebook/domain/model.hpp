#pragma once

#include "fakebook/core/ids.hpp"
#include "fakebook/core/time.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fakebook {

/// Every experiment pairs one participant with exactly this many bots.
inline constexpr int kBotCount = 6;

enum class Role { participant, bot, admin };
enum class Condition { many_likes, few_likes };
enum class ExperimentState { created, running, finished };
enum class PostOrigin { participant, bot_planned };
enum class ReactionKind { like, dislike, flag };

// Upper-case wire names, e.g. MANY_LIKES. Parsers throw Error(validation).
std::string_view to_string(Role v) noexcept;
std::string_view to_string(Condition v) noexcept;
std::string_view to_string(ExperimentState v) noexcept;
std::string_view to_string(PostOrigin v) noexcept;
std::string_view to_string(ReactionKind v) noexcept;

Role parse_role(std::string_view s);
Condition parse_condition(std::string_view s);
ExperimentState parse_experiment_state(std::string_view s);
PostOrigin parse_post_origin(std::string_view s);
ReactionKind parse_reaction_kind(std::string_view s);

struct ProfileCard {
    std::string gender;
    std::optional<int> age;
    std::string nationality;
    std::vector<std::string> interests;
    std::string bio;

    friend bool operator==(const ProfileCard&, const ProfileCard&) = default;
};

struct Account {
    AccountId account_id;
    Role role = Role::participant;
    std::string display_name;
    ProfileCard profile;
    std::string credential_hash;  // empty for bots
};

struct Experiment {
    ExperimentId experiment_id;
    AccountId participant_id;
    std::array<AccountId, kBotCount> bot_ids;
    Condition condition = Condition::many_likes;
    Instant start_instant{};
    int day_count = 5;
    int wrapup_day = 6;
    ExperimentState state = ExperimentState::created;

    /// Roster position (1-based) of a bot account, or 0 when not a bot here.
    int bot_index_of(const AccountId& account) const noexcept;
    const AccountId& bot(int bot_index) const { return bot_ids.at(bot_index - 1); }

    /// Start of 1-based study day `day`; day 1 begins at start_instant.
    Instant day_begin(int day) const { return start_instant + (day - 1) * kDay; }
    /// 1-based study day containing `t`; 0 or negative before the start.
    int day_of(Instant t) const;
    Instant study_end() const { return day_begin(day_count + 1); }
};

struct Post {
    PostId post_id;
    AccountId author_id;
    std::string body;
    Instant created_at{};
    PostOrigin origin = PostOrigin::participant;
};

struct Reaction {
    ReactionId reaction_id;
    AccountId actor_id;
    PostId post_id;
    ReactionKind kind = ReactionKind::like;
    Instant created_at{};
};

struct Advertisement {
    AdId ad_id;
    std::string title;
    std::string body;
    std::string image_ref;
};

struct FriendEdge {
    AccountId a;
    AccountId b;
};

struct FeatureFlags {
    bool chat_enabled = false;
    bool comments_enabled = false;
    bool friend_requests_enabled = false;
    bool friends_only_feed = true;
    /// Display policy: participants see like counts only unless this is set.
    bool show_dislike_flag_counts = false;

    friend bool operator==(const FeatureFlags&, const FeatureFlags&) = default;
};

}  // namespace fakebook
