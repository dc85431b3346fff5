#include "fakebook/core/error.hpp"
#include "fakebook/domain/feed.hpp"
#include "fakebook/domain/model.hpp"
#include "fakebook/domain/reaction_ledger.hpp"

#include <algorithm>
#include <utility>
#include <unordered_set>

#include <fmt/format.h>

namespace fakebook {

namespace {

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& values, std::string_view what) {
    for (auto v : values)
        if (to_string(v) == s) return v;
    fail(ErrorCode::validation, fmt::format("unknown {} '{}'", what, s));
}

}  // namespace

std::string_view to_string(Role v) noexcept {
    switch (v) {
        case Role::participant: return "PARTICIPANT";
        case Role::bot: return "BOT";
        case Role::admin: return "ADMIN";
    }
    return "";
}

std::string_view to_string(Condition v) noexcept {
    switch (v) {
        case Condition::many_likes: return "MANY_LIKES";
        case Condition::few_likes: return "FEW_LIKES";
    }
    return "";
}

std::string_view to_string(ExperimentState v) noexcept {
    switch (v) {
        case ExperimentState::created: return "CREATED";
        case ExperimentState::running: return "RUNNING";
        case ExperimentState::finished: return "FINISHED";
    }
    return "";
}

std::string_view to_string(PostOrigin v) noexcept {
    switch (v) {
        case PostOrigin::participant: return "PARTICIPANT";
        case PostOrigin::bot_planned: return "BOT_PLANNED";
    }
    return "";
}

std::string_view to_string(ReactionKind v) noexcept {
    switch (v) {
        case ReactionKind::like: return "LIKE";
        case ReactionKind::dislike: return "DISLIKE";
        case ReactionKind::flag: return "FLAG";
    }
    return "";
}

Role parse_role(std::string_view s) {
    return parse_enum(s, std::array{Role::participant, Role::bot, Role::admin}, "role");
}
Condition parse_condition(std::string_view s) {
    return parse_enum(s, std::array{Condition::many_likes, Condition::few_likes}, "condition");
}
ExperimentState parse_experiment_state(std::string_view s) {
    return parse_enum(s,
                      std::array{ExperimentState::created, ExperimentState::running,
                                 ExperimentState::finished},
                      "experiment state");
}
PostOrigin parse_post_origin(std::string_view s) {
    return parse_enum(s, std::array{PostOrigin::participant, PostOrigin::bot_planned}, "post origin");
}
ReactionKind parse_reaction_kind(std::string_view s) {
    return parse_enum(s, std::array{ReactionKind::like, ReactionKind::dislike, ReactionKind::flag},
                      "reaction kind");
}

int Experiment::bot_index_of(const AccountId& account) const noexcept {
    for (int i = 0; i < kBotCount; ++i)
        if (bot_ids[i] == account) return i + 1;
    return 0;
}

int Experiment::day_of(Instant t) const {
    const auto since = t - start_instant;
    if (since < Duration::zero()) return 0;
    return static_cast<int>(since / kDay) + 1;
}

// ---------------------------------------------------------------------------
// ReactionLedger

void ReactionLedger::register_post(const PostId& post, const AccountId& author) {
    std::lock_guard lock(mutex_);
    posts_[post].author = author;
}

bool ReactionLedger::has_post(const PostId& post) const {
    std::lock_guard lock(mutex_);
    return posts_.contains(post);
}

const ReactionLedger::PostEntry& ReactionLedger::entry(const PostId& post) const {
    auto it = posts_.find(post);
    if (it == posts_.end()) fail(ErrorCode::not_found, fmt::format("unknown post '{}'", post.str()));
    return it->second;
}

ReactionLedger::PostEntry& ReactionLedger::entry(const PostId& post) {
    return const_cast<PostEntry&>(std::as_const(*this).entry(post));
}

UpsertOutcome ReactionLedger::upsert(const Reaction& reaction) {
    std::lock_guard lock(mutex_);
    auto& e = entry(reaction.post_id);
    if (e.author == reaction.actor_id) fail(ErrorCode::forbidden, "accounts cannot react to their own posts");
    auto [it, inserted] = e.reactions.try_emplace(Key{reaction.actor_id, reaction.kind}, reaction);
    if (!inserted) return UpsertOutcome::already_present;
    ++size_;
    return UpsertOutcome::inserted;
}

bool ReactionLedger::retract(const AccountId& actor, const PostId& post, ReactionKind kind) {
    std::lock_guard lock(mutex_);
    auto& e = entry(post);
    if (e.reactions.erase(Key{actor, kind}) == 0) return false;
    --size_;
    return true;
}

ReactionCounts ReactionLedger::counts(const PostId& post) const {
    std::lock_guard lock(mutex_);
    ReactionCounts c;
    for (const auto& [key, r] : entry(post).reactions) {
        switch (r.kind) {
            case ReactionKind::like: ++c.likes; break;
            case ReactionKind::dislike: ++c.dislikes; break;
            case ReactionKind::flag: ++c.flags; break;
        }
    }
    return c;
}

std::size_t ReactionLedger::like_count(const PostId& post) const { return counts(post).likes; }

std::vector<AccountId> ReactionLedger::likers(const PostId& post) const {
    std::vector<AccountId> out;
    for (const auto& r : on_post(post))
        if (r.kind == ReactionKind::like) out.push_back(r.actor_id);
    return out;
}

bool ReactionLedger::has(const AccountId& actor, const PostId& post, ReactionKind kind) const {
    std::lock_guard lock(mutex_);
    auto it = posts_.find(post);
    return it != posts_.end() && it->second.reactions.contains(Key{actor, kind});
}

namespace {

void sort_chronologically(std::vector<Reaction>& reactions) {
    std::sort(reactions.begin(), reactions.end(), [](const Reaction& a, const Reaction& b) {
        return std::tie(a.created_at, a.reaction_id) < std::tie(b.created_at, b.reaction_id);
    });
}

}  // namespace

std::vector<Reaction> ReactionLedger::all() const {
    std::vector<Reaction> out;
    {
        std::lock_guard lock(mutex_);
        out.reserve(size_);
        for (const auto& [post, e] : posts_)
            for (const auto& [key, r] : e.reactions) out.push_back(r);
    }
    sort_chronologically(out);
    return out;
}

std::vector<Reaction> ReactionLedger::on_post(const PostId& post) const {
    std::vector<Reaction> out;
    {
        std::lock_guard lock(mutex_);
        for (const auto& [key, r] : entry(post).reactions) out.push_back(r);
    }
    sort_chronologically(out);
    return out;
}

std::size_t ReactionLedger::size() const {
    std::lock_guard lock(mutex_);
    return size_;
}

// ---------------------------------------------------------------------------
// FriendGraph

void FriendGraph::add_account(const AccountId& account) {
    std::lock_guard lock(mutex_);
    adjacency_.try_emplace(account);
}

bool FriendGraph::contains(const AccountId& account) const {
    std::lock_guard lock(mutex_);
    return adjacency_.contains(account);
}

void FriendGraph::befriend(const AccountId& a, const AccountId& b) {
    if (a == b) fail(ErrorCode::validation, "an account cannot befriend itself");
    std::lock_guard lock(mutex_);
    auto ia = adjacency_.find(a);
    auto ib = adjacency_.find(b);
    if (ia == adjacency_.end() || ib == adjacency_.end())
        fail(ErrorCode::not_found, "friend edge references an unknown account");
    if (std::find(ia->second.begin(), ia->second.end(), b) != ia->second.end()) return;
    ia->second.push_back(b);
    ib->second.push_back(a);
}

bool FriendGraph::are_friends(const AccountId& a, const AccountId& b) const {
    std::lock_guard lock(mutex_);
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && std::find(it->second.begin(), it->second.end(), b) != it->second.end();
}

std::vector<AccountId> FriendGraph::friends_of(const AccountId& account) const {
    std::lock_guard lock(mutex_);
    auto it = adjacency_.find(account);
    if (it == adjacency_.end()) fail(ErrorCode::not_found, fmt::format("unknown account '{}'", account.str()));
    return it->second;
}

std::vector<FriendEdge> FriendGraph::edges() const {
    std::lock_guard lock(mutex_);
    std::vector<FriendEdge> out;
    for (const auto& [a, friends] : adjacency_)
        for (const auto& b : friends)
            if (a < b) out.push_back({a, b});
    std::sort(out.begin(), out.end(),
              [](const FriendEdge& x, const FriendEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    return out;
}

// ---------------------------------------------------------------------------
// feed

std::size_t like_count(const PostId& post, const ReactionLedger& ledger) { return ledger.like_count(post); }

bool newer_first(const Post& lhs, const Post& rhs) noexcept {
    if (lhs.created_at != rhs.created_at) return lhs.created_at > rhs.created_at;
    return lhs.post_id > rhs.post_id;
}

std::vector<Post> visible_posts(const AccountId& viewer, const FeatureFlags& flags, const FriendGraph& friends,
                                std::span<const Post> posts) {
    if (!friends.contains(viewer)) fail(ErrorCode::not_found, fmt::format("unknown viewer '{}'", viewer.str()));
    std::vector<Post> out;
    if (flags.friends_only_feed) {
        const auto list = friends.friends_of(viewer);
        std::unordered_set<AccountId> allowed(list.begin(), list.end());
        allowed.insert(viewer);
        for (const auto& p : posts)
            if (allowed.contains(p.author_id)) out.push_back(p);
    } else {
        out.assign(posts.begin(), posts.end());
    }
    std::sort(out.begin(), out.end(), newer_first);
    return out;
}

}  // namespace fakebook
