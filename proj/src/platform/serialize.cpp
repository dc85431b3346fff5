#include "fakebook/platform/serialize.hpp"

#include "fakebook/core/error.hpp"

#include <fmt/format.h>

namespace fakebook {

using nlohmann::json;

nlohmann::json instant_json(Instant t) { return format_instant(t); }

Instant instant_from(const nlohmann::json& j) {
    const auto text = j.get<std::string>();
    auto t = parse_instant(text);
    if (!t) fail(ErrorCode::validation, fmt::format("'{}' is not an ISO-8601 UTC timestamp", text));
    return *t;
}

namespace {

json optional_instant(const std::optional<Instant>& t) { return t ? instant_json(*t) : json(nullptr); }

std::optional<Instant> optional_instant_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return instant_from(j.at(key));
}

}  // namespace

void to_json(json& j, const ProfileCard& v) {
    j = {{"gender", v.gender},
         {"age", v.age ? json(*v.age) : json(nullptr)},
         {"nationality", v.nationality},
         {"interests", v.interests},
         {"bio", v.bio}};
}

void from_json(const json& j, ProfileCard& v) {
    v.gender = j.value("gender", "");
    v.age = j.contains("age") && !j.at("age").is_null() ? std::optional<int>(j.at("age").get<int>()) : std::nullopt;
    v.nationality = j.value("nationality", "");
    v.interests = j.value("interests", std::vector<std::string>{});
    v.bio = j.value("bio", "");
}

void to_json(json& j, const Account& v) {
    j = {{"account_id", v.account_id},
         {"role", to_string(v.role)},
         {"display_name", v.display_name},
         {"profile", v.profile},
         {"credential_hash", v.credential_hash}};
}

void from_json(const json& j, Account& v) {
    v.account_id = j.at("account_id").get<AccountId>();
    v.role = parse_role(j.at("role").get<std::string>());
    v.display_name = j.at("display_name").get<std::string>();
    v.profile = j.value("profile", ProfileCard{});
    v.credential_hash = j.value("credential_hash", "");
}

void to_json(json& j, const Experiment& v) {
    j = {{"experiment_id", v.experiment_id},
         {"participant_id", v.participant_id},
         {"bot_ids", v.bot_ids},
         {"condition", to_string(v.condition)},
         {"start_instant", instant_json(v.start_instant)},
         {"day_count", v.day_count},
         {"wrapup_day", v.wrapup_day},
         {"state", to_string(v.state)}};
}

void from_json(const json& j, Experiment& v) {
    v.experiment_id = j.at("experiment_id").get<ExperimentId>();
    v.participant_id = j.at("participant_id").get<AccountId>();
    const auto& bots = j.at("bot_ids");
    if (!bots.is_array() || bots.size() != kBotCount)
        fail(ErrorCode::validation, fmt::format("experiment needs exactly {} bot ids", kBotCount));
    for (std::size_t i = 0; i < kBotCount; ++i) v.bot_ids[i] = bots[i].get<AccountId>();
    v.condition = parse_condition(j.at("condition").get<std::string>());
    v.start_instant = instant_from(j.at("start_instant"));
    v.day_count = j.at("day_count").get<int>();
    v.wrapup_day = j.at("wrapup_day").get<int>();
    v.state = parse_experiment_state(j.at("state").get<std::string>());
}

void to_json(json& j, const Post& v) {
    j = {{"post_id", v.post_id},
         {"author_id", v.author_id},
         {"body", v.body},
         {"created_at", instant_json(v.created_at)},
         {"origin", to_string(v.origin)}};
}

void from_json(const json& j, Post& v) {
    v.post_id = j.at("post_id").get<PostId>();
    v.author_id = j.at("author_id").get<AccountId>();
    v.body = j.at("body").get<std::string>();
    v.created_at = instant_from(j.at("created_at"));
    v.origin = parse_post_origin(j.at("origin").get<std::string>());
}

void to_json(json& j, const Reaction& v) {
    j = {{"reaction_id", v.reaction_id},
         {"actor_id", v.actor_id},
         {"post_id", v.post_id},
         {"kind", to_string(v.kind)},
         {"created_at", instant_json(v.created_at)}};
}

void from_json(const json& j, Reaction& v) {
    v.reaction_id = j.at("reaction_id").get<ReactionId>();
    v.actor_id = j.at("actor_id").get<AccountId>();
    v.post_id = j.at("post_id").get<PostId>();
    v.kind = parse_reaction_kind(j.at("kind").get<std::string>());
    v.created_at = instant_from(j.at("created_at"));
}

void to_json(json& j, const Advertisement& v) {
    j = {{"ad_id", v.ad_id}, {"title", v.title}, {"body", v.body}, {"image_ref", v.image_ref}};
}

void from_json(const json& j, Advertisement& v) {
    v.ad_id = j.at("ad_id").get<AdId>();
    v.title = j.value("title", "");
    v.body = j.value("body", "");
    v.image_ref = j.value("image_ref", "");
}

void to_json(json& j, const FeatureFlags& v) {
    j = {{"chat_enabled", v.chat_enabled},
         {"comments_enabled", v.comments_enabled},
         {"friend_requests_enabled", v.friend_requests_enabled},
         {"friends_only_feed", v.friends_only_feed},
         {"show_dislike_flag_counts", v.show_dislike_flag_counts}};
}

void from_json(const json& j, FeatureFlags& v) {
    if (!j.is_object()) fail(ErrorCode::validation, "feature flags must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool* field = nullptr;
        if (key == "chat_enabled") field = &v.chat_enabled;
        else if (key == "comments_enabled") field = &v.comments_enabled;
        else if (key == "friend_requests_enabled") field = &v.friend_requests_enabled;
        else if (key == "friends_only_feed") field = &v.friends_only_feed;
        else if (key == "show_dislike_flag_counts") field = &v.show_dislike_flag_counts;
        else fail(ErrorCode::validation, fmt::format("unknown feature flag '{}'", key));
        if (!value.is_boolean()) fail(ErrorCode::validation, fmt::format("flag '{}' must be true or false", key));
        *field = value.get<bool>();
    }
}

void to_json(json& j, const ScheduledEvent& v) {
    j = {{"event_id", v.event_id},
         {"experiment_id", v.experiment_id},
         {"due_at", optional_instant(v.due_at)},
         {"action", to_string(v.action)},
         {"plan_id", v.plan_id},
         {"bot_index", v.bot_index},
         {"target_post", v.target_post ? json(v.target_post->str()) : json(nullptr)},
         {"target_day", v.target_day ? json(*v.target_day) : json(nullptr)},
         {"source", to_string(v.source)},
         {"status", to_string(v.status)},
         {"note", v.note}};
}

void from_json(const json& j, ScheduledEvent& v) {
    v.event_id = j.at("event_id").get<EventId>();
    v.experiment_id = j.at("experiment_id").get<ExperimentId>();
    v.due_at = optional_instant_from(j, "due_at");
    v.action = parse_action_kind(j.at("action").get<std::string>());
    v.plan_id = j.value("plan_id", "");
    v.bot_index = j.at("bot_index").get<int>();
    v.target_post = j.contains("target_post") && !j.at("target_post").is_null()
                        ? std::optional<PostId>(j.at("target_post").get<PostId>())
                        : std::nullopt;
    v.target_day = j.contains("target_day") && !j.at("target_day").is_null()
                       ? std::optional<int>(j.at("target_day").get<int>())
                       : std::nullopt;
    v.source = parse_like_source(j.at("source").get<std::string>());
    v.status = parse_event_status(j.at("status").get<std::string>());
    v.note = j.value("note", "");
}

void to_json(json& j, const PostGrant& v) {
    j = {{"post_id", v.post_id}, {"granted", v.granted}, {"actor_bot_indices", v.actor_bot_indices}};
}

void from_json(const json& j, PostGrant& v) {
    v.post_id = j.at("post_id").get<PostId>();
    v.granted = j.at("granted").get<int>();
    v.actor_bot_indices = j.at("actor_bot_indices").get<std::vector<int>>();
}

void to_json(json& j, const TreatmentLedger& v) {
    j = {{"experiment_id", v.experiment_id},
         {"condition", to_string(v.condition)},
         {"per_post_grants", v.per_post_grants},
         {"total_granted", v.total_granted},
         {"posts_seen", v.posts_seen},
         {"first_post", v.first_post ? json(v.first_post->str()) : json(nullptr)},
         {"roster_cursor", v.roster_cursor}};
}

void from_json(const json& j, TreatmentLedger& v) {
    v.experiment_id = j.at("experiment_id").get<ExperimentId>();
    v.condition = parse_condition(j.at("condition").get<std::string>());
    v.per_post_grants = j.at("per_post_grants").get<std::vector<PostGrant>>();
    v.total_granted = j.at("total_granted").get<int>();
    v.posts_seen = j.at("posts_seen").get<int>();
    v.first_post = j.contains("first_post") && !j.at("first_post").is_null()
                       ? std::optional<PostId>(j.at("first_post").get<PostId>())
                       : std::nullopt;
    v.roster_cursor = j.at("roster_cursor").get<int>();
}

void to_json(json& j, const RunnerState& v) {
    json plan_posts = json::object();
    for (const auto& [plan, post] : v.plan_posts) plan_posts[plan] = post.str();
    json day_posts = json::object();
    for (const auto& [day, post] : v.participant_day_posts) day_posts[std::to_string(day)] = post.str();
    j = {{"experiment", v.experiment},
         {"events", v.events},
         {"ledger", v.ledger},
         {"plan_posts", plan_posts},
         {"participant_day_posts", day_posts},
         {"high_water", optional_instant(v.high_water)}};
}

void from_json(const json& j, RunnerState& v) {
    v.experiment = j.at("experiment").get<Experiment>();
    v.events = j.at("events").get<std::vector<ScheduledEvent>>();
    v.ledger = j.at("ledger").get<TreatmentLedger>();
    v.plan_posts.clear();
    for (const auto& [plan, post] : j.at("plan_posts").items()) v.plan_posts[plan] = post.get<PostId>();
    v.participant_day_posts.clear();
    for (const auto& [day, post] : j.at("participant_day_posts").items())
        v.participant_day_posts[std::stoi(day)] = post.get<PostId>();
    v.high_water = optional_instant_from(j, "high_water");
}

void to_json(json& j, const Session& v) {
    j = {{"session_id", v.session_id},
         {"account_id", v.account_id},
         {"started_at", instant_json(v.started_at)},
         {"ended_at", optional_instant(v.ended_at)},
         {"last_seen", instant_json(v.last_seen)},
         {"token_digest", v.token_digest}};
}

void from_json(const json& j, Session& v) {
    v.session_id = j.at("session_id").get<SessionId>();
    v.account_id = j.at("account_id").get<AccountId>();
    v.started_at = instant_from(j.at("started_at"));
    v.ended_at = optional_instant_from(j, "ended_at");
    v.last_seen = instant_from(j.at("last_seen"));
    v.token_digest = j.value("token_digest", "");
}

void to_json(json& j, const ViewEvent& v) {
    j = {{"view_id", v.view_id},
         {"session_id", v.session_id},
         {"post_id", v.post_id},
         {"duration_ms", v.duration_ms},
         {"recorded_at", instant_json(v.recorded_at)}};
}

void from_json(const json& j, ViewEvent& v) {
    v.view_id = j.at("view_id").get<std::string>();
    v.session_id = j.at("session_id").get<SessionId>();
    v.post_id = j.at("post_id").get<PostId>();
    v.duration_ms = j.at("duration_ms").get<std::int64_t>();
    v.recorded_at = instant_from(j.at("recorded_at"));
}

void to_json(json& j, const AdClickEvent& v) {
    j = {{"click_id", v.click_id},
         {"session_id", v.session_id},
         {"ad_id", v.ad_id},
         {"clicked_at", instant_json(v.clicked_at)}};
}

void from_json(const json& j, AdClickEvent& v) {
    v.click_id = j.at("click_id").get<std::string>();
    v.session_id = j.at("session_id").get<SessionId>();
    v.ad_id = j.at("ad_id").get<AdId>();
    v.clicked_at = instant_from(j.at("clicked_at"));
}

}  // namespace fakebook
