#pragma once

#include "fakebook/domain/model.hpp"

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fakebook {

// ---------------------------------------------------------------------------
// Fixture records. Bots are referred to by their 1-based roster index.

struct BotProfile {
    int bot_index = 0;
    std::string display_name;
    ProfileCard profile;

    friend bool operator==(const BotProfile&, const BotProfile&) = default;
};

/// A bot post placed relative to the experiment start.
struct PlannedPost {
    std::string plan_id;
    int bot_index = 0;
    int day_offset = 0;                 // 0-based
    std::chrono::seconds time_offset{}; // within the day, [0, 86400)
    std::string body;

    friend bool operator==(const PlannedPost&, const PlannedPost&) = default;
};

struct BotPostTarget {
    std::string plan_id;
    friend bool operator==(const BotPostTarget&, const BotPostTarget&) = default;
};

/// The participant's post of a given 1-based study day; bound at runtime.
struct ParticipantPostTarget {
    int day = 0;
    friend bool operator==(const ParticipantPostTarget&, const ParticipantPostTarget&) = default;
};

using LikeTarget = std::variant<BotPostTarget, ParticipantPostTarget>;

/// A bot like placed relative to the creation of its target post.
struct PlannedLike {
    std::string plan_id;
    int actor_bot_index = 0;
    LikeTarget target;
    std::chrono::seconds delay{};

    friend bool operator==(const PlannedLike&, const PlannedLike&) = default;
};

struct FixtureBundle {
    std::vector<BotProfile> bots;
    std::vector<PlannedPost> posts;
    std::vector<PlannedLike> likes;
    std::vector<Advertisement> ads;
};

// ---------------------------------------------------------------------------
// Parsing

/// A located problem in an input file. `row` counts CSV records with the
/// header as row 1; 0 means the problem is not tied to a row.
struct FixtureIssue {
    std::string file;
    std::size_t row = 0;
    std::string column;
    std::string message;

    std::string to_string() const;
};

template <class T>
struct Parsed {
    std::vector<T> records;
    std::vector<FixtureIssue> issues;

    bool ok() const noexcept { return issues.empty(); }
};

inline constexpr std::string_view kBotsHeader = "bot_index,display_name,gender,age,nationality,interests,bio";
inline constexpr std::string_view kPostsHeader = "plan_id,bot_index,day_offset,time_offset,body";
inline constexpr std::string_view kLikesHeader = "plan_id,actor_bot_index,target_kind,target_ref,delay_seconds";

// Total over arbitrary bytes: every input yields records or located issues.
Parsed<BotProfile> parse_bots(std::string_view csv_bytes);
Parsed<PlannedPost> parse_planned_posts(std::string_view csv_bytes);
Parsed<PlannedLike> parse_planned_likes(std::string_view csv_bytes);

std::string serialize_bots(const std::vector<BotProfile>& bots);
std::string serialize_planned_posts(const std::vector<PlannedPost>& posts);
std::string serialize_planned_likes(const std::vector<PlannedLike>& likes);

/// `HH:MM:SS` within one day.
std::optional<std::chrono::seconds> parse_time_of_day(std::string_view text);
std::string format_time_of_day(std::chrono::seconds offset);

struct FixtureFiles {
    std::string bots_csv;
    std::string posts_csv;
    std::string likes_csv;
};

/// Parses all three files; ads are not part of the CSV upload.
Parsed<FixtureBundle> parse_fixture(const FixtureFiles& files);

// ---------------------------------------------------------------------------
// Validation

enum class ValidationStatus { pass, fail };

struct ValidationReport {
    ValidationStatus status = ValidationStatus::pass;
    /// Likes each bot's planned posts receive from other bots, by roster index.
    std::array<int, kBotCount> bot_like_sums{};
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool passed() const noexcept { return status == ValidationStatus::pass; }
};

void to_json(nlohmann::json& j, const ValidationReport& report);

struct ValidationOptions {
    /// Fail (instead of warn) when the like profile deviates from the study's
    /// {2-3, 2-3, 12, 12, 24, 24} distribution.
    bool require_study_profile = false;
};

inline constexpr int kMaxBotLikesPerPost = 5;

ValidationReport validate_fixture(const FixtureBundle& bundle, Condition condition, int day_count,
                                  const ValidationOptions& options = {});

struct FixtureVerdict;
FixtureVerdict check_fixture(FixtureBundle bundle, Condition condition, int day_count,
                             const ValidationOptions& options);

/// A fixture that passed validation for a given condition and day count.
/// Only obtainable through check_fixture.
class ValidatedFixture {
public:
    const FixtureBundle& bundle() const noexcept { return bundle_; }
    int day_count() const noexcept { return day_count_; }

    const PlannedPost* find_post(std::string_view plan_id) const;
    const PlannedLike* find_like(std::string_view plan_id) const;

private:
    friend FixtureVerdict check_fixture(FixtureBundle, Condition, int, const ValidationOptions&);
    ValidatedFixture(FixtureBundle bundle, int day_count) : bundle_(std::move(bundle)), day_count_(day_count) {}

    FixtureBundle bundle_;
    int day_count_ = 5;
};

struct FixtureVerdict {
    ValidationReport report;
    std::optional<ValidatedFixture> fixture;
};

inline FixtureVerdict check_fixture(FixtureBundle bundle, Condition condition, int day_count) {
    return check_fixture(std::move(bundle), condition, day_count, ValidationOptions{});
}

// ---------------------------------------------------------------------------
// Ship-with study fixture

/// The bundled CSV files (six bots, thirty posts, bot-to-bot likes).
FixtureFiles default_fixture_files();
/// Parsed default fixture including the two default advertisements.
FixtureBundle default_fixture();
std::vector<Advertisement> default_advertisements();

}  // namespace fakebook
