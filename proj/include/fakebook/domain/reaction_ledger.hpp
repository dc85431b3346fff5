#pragma once

#include "fakebook/domain/model.hpp"

#include <map>
#include <mutex>
#include <utility>
#include <unordered_map>
#include <vector>

namespace fakebook {

struct ReactionCounts {
    std::size_t likes = 0;
    std::size_t dislikes = 0;
    std::size_t flags = 0;
};

enum class UpsertOutcome { inserted, already_present };

/// Thread-safe store of reactions, keyed by (actor, post, kind).
///
/// Posts must be registered with their author before they can be reacted
/// to; the ledger rejects reactions on unknown posts and on the actor's own
/// posts. Inserting an existing (actor, post, kind) is a no-op.
class ReactionLedger {
public:
    void register_post(const PostId& post, const AccountId& author);
    bool has_post(const PostId& post) const;

    UpsertOutcome upsert(const Reaction& reaction);
    /// Removes the reaction if present. Returns whether anything was removed.
    bool retract(const AccountId& actor, const PostId& post, ReactionKind kind);

    std::size_t like_count(const PostId& post) const;
    ReactionCounts counts(const PostId& post) const;
    /// Accounts with a LIKE on `post`, oldest reaction first.
    std::vector<AccountId> likers(const PostId& post) const;
    bool has(const AccountId& actor, const PostId& post, ReactionKind kind) const;

    std::vector<Reaction> all() const;
    std::vector<Reaction> on_post(const PostId& post) const;
    std::size_t size() const;

private:
    using Key = std::pair<AccountId, ReactionKind>;
    struct PostEntry {
        AccountId author;
        std::map<Key, Reaction> reactions;
    };

    const PostEntry& entry(const PostId& post) const;
    PostEntry& entry(const PostId& post);

    mutable std::mutex mutex_;
    std::unordered_map<PostId, PostEntry> posts_;
    std::size_t size_ = 0;
};

/// Symmetric friendship relation over registered accounts.
class FriendGraph {
public:
    void add_account(const AccountId& account);
    bool contains(const AccountId& account) const;
    void befriend(const AccountId& a, const AccountId& b);
    bool are_friends(const AccountId& a, const AccountId& b) const;
    std::vector<AccountId> friends_of(const AccountId& account) const;
    /// Each edge once, with a < b.
    std::vector<FriendEdge> edges() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<AccountId, std::vector<AccountId>> adjacency_;
};

}  // namespace fakebook
