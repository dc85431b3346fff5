#include "fakebook/fixture/fixture.hpp"

#include "fakebook/core/text.hpp"
#include "fakebook/core/csv.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace fakebook {

std::string FixtureIssue::to_string() const {
    std::string where = file;
    if (row) where += fmt::format(" row {}", row);
    if (!column.empty()) where += fmt::format(" column {}", column);
    return where.empty() ? message : fmt::format("{}: {}", where, message);
}

std::optional<std::chrono::seconds> parse_time_of_day(std::string_view text) {
    if (text.size() != 8 || text[2] != ':' || text[5] != ':') return std::nullopt;
    auto part = [&](std::size_t pos) -> std::optional<int> {
        const char a = text[pos], b = text[pos + 1];
        if (a < '0' || a > '9' || b < '0' || b > '9') return std::nullopt;
        return (a - '0') * 10 + (b - '0');
    };
    auto h = part(0), m = part(3), s = part(6);
    if (!h || !m || !s || *h > 23 || *m > 59 || *s > 59) return std::nullopt;
    return std::chrono::seconds{*h * 3600 + *m * 60 + *s};
}

std::string format_time_of_day(std::chrono::seconds offset) {
    const auto s = offset.count();
    return fmt::format("{:02d}:{:02d}:{:02d}", s / 3600, (s / 60) % 60, s % 60);
}

namespace {

/// Shared front half of every fixture parser: encoding, syntax, header and
/// field-count checks. Returns the data records that are safe to read.
class TableReader {
public:
    TableReader(std::string file, std::string_view header, std::vector<FixtureIssue>& issues)
        : file_(std::move(file)), columns_(split(header, ',')), issues_(issues) {}

    std::vector<csv::Record> read(std::string_view bytes) {
        if (!is_valid_utf8(bytes)) {
            std::size_t line = 1;
            std::size_t start = 0;
            while (true) {
                auto end = bytes.find('\n', start);
                if (!is_valid_utf8(bytes.substr(start, end == std::string_view::npos ? end : end - start)) ||
                    end == std::string_view::npos)
                    break;
                start = end + 1;
                ++line;
            }
            issue(line, "", "input is not valid UTF-8");
            return {};
        }
        std::vector<csv::Record> records;
        try {
            records = csv::read(bytes);
        } catch (const csv::SyntaxError& e) {
            issue(e.row(), "", e.what());
            return {};
        }
        if (records.empty()) {
            issue(1, "", fmt::format("missing header; expected '{}'", join(columns_, ",")));
            return {};
        }
        if (!check_header(records.front())) return {};

        std::vector<csv::Record> data;
        for (std::size_t i = 1; i < records.size(); ++i) {
            auto& r = records[i];
            if (r.fields.size() != columns_.size()) {
                issue(r.row, "", fmt::format("expected {} fields, found {}", columns_.size(), r.fields.size()));
                continue;
            }
            data.push_back(std::move(r));
        }
        return data;
    }

    void issue(std::size_t row, std::string column, std::string message) {
        issues_.push_back({file_, row, std::move(column), std::move(message)});
    }

    std::size_t issue_count() const { return issues_.size(); }

    const std::string& field(const csv::Record& r, std::size_t col) const { return r.fields.at(col); }

    std::optional<long long> integer(const csv::Record& r, std::size_t col, long long lo, long long hi) {
        const auto& text = r.fields.at(col);
        auto v = parse_int(text);
        if (!v) {
            issue(r.row, columns_[col], fmt::format("'{}' is not an integer", text));
            return std::nullopt;
        }
        if (*v < lo || *v > hi) {
            issue(r.row, columns_[col], fmt::format("{} is out of range [{}, {}]", *v, lo, hi));
            return std::nullopt;
        }
        return v;
    }

private:
    bool check_header(const csv::Record& header) {
        if (header.fields == columns_) return true;
        std::vector<std::string> missing, unexpected;
        for (const auto& c : columns_)
            if (std::find(header.fields.begin(), header.fields.end(), c) == header.fields.end()) missing.push_back(c);
        for (const auto& c : header.fields)
            if (std::find(columns_.begin(), columns_.end(), c) == columns_.end()) unexpected.push_back(c);
        std::string diff;
        if (!missing.empty()) diff += fmt::format("missing columns [{}]", join(missing, ","));
        if (!unexpected.empty()) {
            if (!diff.empty()) diff += "; ";
            diff += fmt::format("unexpected columns [{}]", join(unexpected, ","));
        }
        if (diff.empty()) diff = "columns out of order";
        issue(1, "", fmt::format("header mismatch: {}; expected '{}'", diff, join(columns_, ",")));
        return false;
    }

    std::string file_;
    std::vector<std::string> columns_;
    std::vector<FixtureIssue>& issues_;
};

constexpr long long kMaxInt = 1'000'000'000;

}  // namespace

Parsed<BotProfile> parse_bots(std::string_view csv_bytes) {
    Parsed<BotProfile> out;
    TableReader t("bots.csv", kBotsHeader, out.issues);
    std::set<long long> seen;
    for (const auto& r : t.read(csv_bytes)) {
        const auto before = t.issue_count();
        BotProfile bot;
        auto index = t.integer(r, 0, 1, kBotCount);
        bot.display_name = t.field(r, 1);
        if (bot.display_name.empty()) t.issue(r.row, "display_name", "display_name must not be empty");
        bot.profile.gender = t.field(r, 2);
        if (!t.field(r, 3).empty()) {
            if (auto age = t.integer(r, 3, 0, 150)) bot.profile.age = static_cast<int>(*age);
        }
        bot.profile.nationality = t.field(r, 4);
        if (!t.field(r, 5).empty()) bot.profile.interests = split(t.field(r, 5), ';');
        bot.profile.bio = t.field(r, 6);
        if (index && !seen.insert(*index).second)
            t.issue(r.row, "bot_index", fmt::format("duplicate bot_index {}", *index));
        if (t.issue_count() != before) continue;
        bot.bot_index = static_cast<int>(*index);
        out.records.push_back(std::move(bot));
    }
    return out;
}

Parsed<PlannedPost> parse_planned_posts(std::string_view csv_bytes) {
    Parsed<PlannedPost> out;
    TableReader t("posts.csv", kPostsHeader, out.issues);
    std::set<std::string> seen;
    for (const auto& r : t.read(csv_bytes)) {
        const auto before = t.issue_count();
        PlannedPost p;
        p.plan_id = t.field(r, 0);
        if (p.plan_id.empty()) t.issue(r.row, "plan_id", "plan_id must not be empty");
        else if (!seen.insert(p.plan_id).second)
            t.issue(r.row, "plan_id", fmt::format("duplicate plan_id '{}'", p.plan_id));
        auto bot = t.integer(r, 1, 1, kBotCount);
        auto day = t.integer(r, 2, 0, kMaxInt);
        auto time = parse_time_of_day(t.field(r, 3));
        if (!time)
            t.issue(r.row, "time_offset",
                    fmt::format("'{}' is not a time of day in HH:MM:SS (00:00:00 to 23:59:59)", t.field(r, 3)));
        p.body = t.field(r, 4);
        if (p.body.empty()) t.issue(r.row, "body", "body must not be empty");
        if (t.issue_count() != before) continue;
        p.bot_index = static_cast<int>(*bot);
        p.day_offset = static_cast<int>(*day);
        p.time_offset = *time;
        out.records.push_back(std::move(p));
    }
    return out;
}

Parsed<PlannedLike> parse_planned_likes(std::string_view csv_bytes) {
    Parsed<PlannedLike> out;
    TableReader t("likes.csv", kLikesHeader, out.issues);
    std::set<std::string> seen;
    for (const auto& r : t.read(csv_bytes)) {
        const auto before = t.issue_count();
        PlannedLike like;
        like.plan_id = t.field(r, 0);
        if (like.plan_id.empty()) t.issue(r.row, "plan_id", "plan_id must not be empty");
        else if (!seen.insert(like.plan_id).second)
            t.issue(r.row, "plan_id", fmt::format("duplicate plan_id '{}'", like.plan_id));
        auto actor = t.integer(r, 1, 1, kBotCount);
        const auto& kind = t.field(r, 2);
        const auto& ref = t.field(r, 3);
        if (kind == "BOT_POST") {
            if (ref.empty()) t.issue(r.row, "target_ref", "BOT_POST target_ref must name a planned post");
            like.target = BotPostTarget{ref};
        } else if (kind == "PARTICIPANT_POST") {
            if (auto day = t.integer(r, 3, 1, kMaxInt)) like.target = ParticipantPostTarget{static_cast<int>(*day)};
        } else {
            t.issue(r.row, "target_kind",
                    fmt::format("unknown target_kind '{}'; expected BOT_POST or PARTICIPANT_POST", kind));
        }
        auto delay = t.integer(r, 4, 0, kMaxInt);
        if (t.issue_count() != before) continue;
        like.actor_bot_index = static_cast<int>(*actor);
        like.delay = std::chrono::seconds{*delay};
        out.records.push_back(std::move(like));
    }
    return out;
}

std::string serialize_bots(const std::vector<BotProfile>& bots) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& b : bots) {
        rows.push_back({std::to_string(b.bot_index), b.display_name, b.profile.gender,
                        b.profile.age ? std::to_string(*b.profile.age) : "", b.profile.nationality,
                        join(b.profile.interests, ";"), b.profile.bio});
    }
    return csv::write(split(kBotsHeader, ','), rows);
}

std::string serialize_planned_posts(const std::vector<PlannedPost>& posts) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : posts) {
        rows.push_back({p.plan_id, std::to_string(p.bot_index), std::to_string(p.day_offset),
                        format_time_of_day(p.time_offset), p.body});
    }
    return csv::write(split(kPostsHeader, ','), rows);
}

std::string serialize_planned_likes(const std::vector<PlannedLike>& likes) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& l : likes) {
        std::string kind, ref;
        if (const auto* bot = std::get_if<BotPostTarget>(&l.target)) {
            kind = "BOT_POST";
            ref = bot->plan_id;
        } else {
            kind = "PARTICIPANT_POST";
            ref = std::to_string(std::get<ParticipantPostTarget>(l.target).day);
        }
        rows.push_back({l.plan_id, std::to_string(l.actor_bot_index), kind, ref, std::to_string(l.delay.count())});
    }
    return csv::write(split(kLikesHeader, ','), rows);
}

Parsed<FixtureBundle> parse_fixture(const FixtureFiles& files) {
    Parsed<FixtureBundle> out;
    out.records.resize(1);
    auto& bundle = out.records.front();
    auto append = [&](auto parsed, auto& into) {
        into = std::move(parsed.records);
        out.issues.insert(out.issues.end(), parsed.issues.begin(), parsed.issues.end());
    };
    append(parse_bots(files.bots_csv), bundle.bots);
    append(parse_planned_posts(files.posts_csv), bundle.posts);
    append(parse_planned_likes(files.likes_csv), bundle.likes);
    if (!out.ok()) out.records.clear();
    return out;
}

// ---------------------------------------------------------------------------
// Validation

void to_json(nlohmann::json& j, const ValidationReport& report) {
    j = nlohmann::json{{"status", report.passed() ? "PASS" : "FAIL"},
                       {"bot_like_sums", report.bot_like_sums},
                       {"errors", report.errors},
                       {"warnings", report.warnings}};
}

namespace {

bool matches_study_profile(std::array<int, kBotCount> sums) {
    std::sort(sums.begin(), sums.end());
    auto low = [](int v) { return v == 2 || v == 3; };
    return low(sums[0]) && low(sums[1]) && sums[2] == 12 && sums[3] == 12 && sums[4] == 24 && sums[5] == 24;
}

}  // namespace

ValidationReport validate_fixture(const FixtureBundle& bundle, Condition condition, int day_count,
                                  const ValidationOptions& options) {
    ValidationReport report;
    auto& errors = report.errors;
    auto& warnings = report.warnings;

    if (day_count < 1) errors.push_back(fmt::format("day_count must be at least 1, got {}", day_count));

    // bots
    std::set<int> bot_indices;
    for (const auto& b : bundle.bots) {
        if (b.bot_index < 1 || b.bot_index > kBotCount)
            errors.push_back(fmt::format("bot_index {} outside 1..{}", b.bot_index, kBotCount));
        else if (!bot_indices.insert(b.bot_index).second)
            errors.push_back(fmt::format("duplicate bot_index {}", b.bot_index));
        if (b.display_name.empty()) errors.push_back(fmt::format("bot {} has no display_name", b.bot_index));
    }
    if (bundle.bots.size() != kBotCount)
        errors.push_back(fmt::format("expected exactly {} bots, found {}", kBotCount, bundle.bots.size()));

    // planned posts
    std::map<std::string, const PlannedPost*> posts_by_plan;
    std::map<int, int> posts_per_bot;
    std::map<int, std::set<int>> days_per_bot;
    for (const auto& p : bundle.posts) {
        if (!posts_by_plan.emplace(p.plan_id, &p).second)
            errors.push_back(fmt::format("duplicate post plan_id '{}'", p.plan_id));
        if (!bot_indices.contains(p.bot_index))
            errors.push_back(fmt::format("post '{}' references unknown bot {}", p.plan_id, p.bot_index));
        if (p.day_offset < 0 || p.day_offset >= day_count)
            errors.push_back(fmt::format("post '{}' has day_offset {} outside the {}-day study", p.plan_id,
                                         p.day_offset, day_count));
        if (p.time_offset.count() < 0 || p.time_offset >= kDay)
            errors.push_back(fmt::format("post '{}' has time_offset outside one day", p.plan_id));
        if (p.body.empty()) errors.push_back(fmt::format("post '{}' has an empty body", p.plan_id));
        ++posts_per_bot[p.bot_index];
        if (!days_per_bot[p.bot_index].insert(p.day_offset).second)
            warnings.push_back(fmt::format("bot {} has more than one post on day_offset {}", p.bot_index, p.day_offset));
    }
    for (int bot : bot_indices) {
        if (posts_per_bot[bot] != day_count)
            errors.push_back(fmt::format("bot {} has {} planned posts; expected one per day ({})", bot,
                                         posts_per_bot[bot], day_count));
    }

    // planned likes
    std::set<std::string> like_ids;
    std::set<std::pair<int, std::string>> bot_pairs;
    std::set<std::pair<int, int>> participant_pairs;
    std::map<std::string, int> likes_per_post;
    int participant_likes = 0;
    for (const auto& l : bundle.likes) {
        if (!like_ids.insert(l.plan_id).second)
            errors.push_back(fmt::format("duplicate like plan_id '{}'", l.plan_id));
        if (!bot_indices.contains(l.actor_bot_index))
            errors.push_back(fmt::format("like '{}' has unknown actor bot {}", l.plan_id, l.actor_bot_index));
        if (l.delay.count() < 0) errors.push_back(fmt::format("like '{}' has a negative delay", l.plan_id));

        if (const auto* target = std::get_if<BotPostTarget>(&l.target)) {
            auto it = posts_by_plan.find(target->plan_id);
            if (it == posts_by_plan.end()) {
                errors.push_back(
                    fmt::format("like '{}' targets missing post plan_id '{}'", l.plan_id, target->plan_id));
                continue;
            }
            const auto& post = *it->second;
            if (post.bot_index == l.actor_bot_index) {
                errors.push_back(fmt::format("like '{}' is a self-like: bot {} likes its own post '{}'", l.plan_id,
                                             l.actor_bot_index, post.plan_id));
                continue;
            }
            if (!bot_pairs.emplace(l.actor_bot_index, target->plan_id).second)
                errors.push_back(fmt::format("like '{}' duplicates bot {} liking '{}'", l.plan_id, l.actor_bot_index,
                                             target->plan_id));
            ++likes_per_post[post.plan_id];
            if (post.bot_index >= 1 && post.bot_index <= kBotCount) ++report.bot_like_sums[post.bot_index - 1];
            const auto due = post.day_offset * kDay + post.time_offset + l.delay;
            if (due >= day_count * kDay)
                warnings.push_back(fmt::format("like '{}' falls after the end of the study", l.plan_id));
        } else {
            const int day = std::get<ParticipantPostTarget>(l.target).day;
            ++participant_likes;
            if (day < 1 || day > day_count)
                errors.push_back(fmt::format("like '{}' targets participant day {} outside 1..{}", l.plan_id, day,
                                             day_count));
            else if (!participant_pairs.emplace(l.actor_bot_index, day).second)
                errors.push_back(fmt::format("like '{}' duplicates bot {} liking the participant's day-{} post",
                                             l.plan_id, l.actor_bot_index, day));
        }
    }

    for (const auto& [plan_id, count] : likes_per_post) {
        if (count > kMaxBotLikesPerPost)
            warnings.push_back(fmt::format("post '{}' receives {} bot likes; the study protocol gives each bot post "
                                           "zero to five likes",
                                           plan_id, count));
    }

    if (participant_likes > 0)
        warnings.push_back(fmt::format("{} planned likes target participant posts; they are applied only within the "
                                       "{} treatment limits",
                                       participant_likes, to_string(condition)));

    if (!matches_study_profile(report.bot_like_sums)) {
        auto sorted = report.bot_like_sums;
        std::sort(sorted.begin(), sorted.end());
        auto msg = fmt::format("bot like sums [{}] differ from the study profile [2-3, 2-3, 12, 12, 24, 24]",
                               fmt::join(sorted, ", "));
        (options.require_study_profile ? errors : warnings).push_back(std::move(msg));
    }

    report.status = errors.empty() ? ValidationStatus::pass : ValidationStatus::fail;
    return report;
}

FixtureVerdict check_fixture(FixtureBundle bundle, Condition condition, int day_count,
                             const ValidationOptions& options) {
    FixtureVerdict verdict{validate_fixture(bundle, condition, day_count, options), std::nullopt};
    if (verdict.report.passed()) verdict.fixture = ValidatedFixture(std::move(bundle), day_count);
    return verdict;
}

const PlannedPost* ValidatedFixture::find_post(std::string_view plan_id) const {
    for (const auto& p : bundle_.posts)
        if (p.plan_id == plan_id) return &p;
    return nullptr;
}

const PlannedLike* ValidatedFixture::find_like(std::string_view plan_id) const {
    for (const auto& l : bundle_.likes)
        if (l.plan_id == plan_id) return &l;
    return nullptr;
}

}  // namespace fakebook
