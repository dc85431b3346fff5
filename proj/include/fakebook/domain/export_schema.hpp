#pragma once

#include <array>
#include <string_view>
#include <vector>
#include <string>

namespace fakebook::export_schema {

struct Table {
    std::string_view name;
    std::vector<std::string> header;

    std::string file_name() const { return std::string(name) + ".csv"; }
};

inline const Table kPosts{"posts", {"post_id", "author_id", "origin", "created_at", "body"}};
inline const Table kReactions{"reactions", {"reaction_id", "actor_id", "post_id", "kind", "created_at"}};
inline const Table kProfiles{
    "profiles", {"account_id", "role", "display_name", "gender", "age", "nationality", "interests", "bio"}};
inline const Table kSessions{"sessions", {"session_id", "account_id", "started_at", "ended_at"}};
inline const Table kViews{"views", {"session_id", "post_id", "duration_ms", "recorded_at"}};
inline const Table kAdClicks{"ad_clicks", {"session_id", "ad_id", "clicked_at"}};
inline const Table kFriendEdges{"friend_edges", {"a", "b"}};
inline const Table kSurveyResponses{"survey_responses", {"account_id", "phase", "item_key", "value"}};
/// Group labels for the analysis.
inline const Table kExperiment{
    "experiment", {"experiment_id", "participant_id", "condition", "start_instant", "day_count", "state"}};

inline const std::array<const Table*, 9> kAllTables = {&kPosts,    &kReactions,  &kProfiles,
                                                       &kSessions, &kViews,      &kAdClicks,
                                                       &kFriendEdges, &kSurveyResponses, &kExperiment};

}  // namespace fakebook::export_schema
