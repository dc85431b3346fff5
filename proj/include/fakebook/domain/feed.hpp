#pragma once

#include "fakebook/domain/model.hpp"
#include "fakebook/domain/reaction_ledger.hpp"

#include <span>
#include <vector>

namespace fakebook {

/// Number of distinct actors with a LIKE on the post. Throws not_found for
/// posts the ledger does not know.
std::size_t like_count(const PostId& post, const ReactionLedger& ledger);

/// Posts the viewer may see, newest first (ties: higher post id first).
/// Under friends_only_feed only the viewer's own posts and those of friends
/// are returned. Throws not_found when the viewer is not in the graph.
std::vector<Post> visible_posts(const AccountId& viewer, const FeatureFlags& flags,
                                const FriendGraph& friends, std::span<const Post> posts);

/// Feed ordering used everywhere posts are listed.
bool newer_first(const Post& lhs, const Post& rhs) noexcept;

}  // namespace fakebook
