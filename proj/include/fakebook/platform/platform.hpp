#pragma once

#include "fakebook/core/time.hpp"
#include "fakebook/domain/model.hpp"
#include "fakebook/domain/reaction_ledger.hpp"
#include "fakebook/fixture/fixture.hpp"
#include "fakebook/measures/instrument.hpp"
#include "fakebook/orchestrator/compliance.hpp"
#include "fakebook/orchestrator/runner.hpp"
#include "fakebook/platform/credentials.hpp"
#include "fakebook/platform/store.hpp"
#include "fakebook/platform/telemetry.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fakebook {

struct PlatformConfig {
    int password_iterations = credentials::kDefaultIterations;
    Duration session_idle_timeout = std::chrono::minutes{30};
    Duration max_view_duration = std::chrono::hours{6};
    /// Admin account created on first start when no account has this login.
    std::string admin_login;
    std::string admin_password;
    GrantPolicy grant_policy;
    InstrumentSet instruments = instruments::default_set();
};

struct AuthContext {
    SessionId session_id;
    AccountId account_id;
    Role role = Role::participant;
    std::optional<ExperimentId> experiment_id;
};

struct LoginResult {
    std::string token;
    AuthContext context;
};

struct FeedItem {
    Post post;
    std::string author_name;
    std::size_t like_count = 0;
    /// (account, display name), oldest like first.
    std::vector<std::pair<AccountId, std::string>> likers;
    bool liked_by_viewer = false;
    ReactionCounts counts;
};

struct Feed {
    std::vector<FeedItem> items;
    FeatureFlags flags;
};

struct CreatedPost {
    Post post;
    std::size_t char_count = 0;
    /// Below the daily task's minimum length; the post is stored regardless.
    bool sub_threshold = false;
    std::size_t likes_scheduled = 0;
};

struct ProfileView {
    AccountId account_id;
    std::string display_name;
    ProfileCard profile;
};

struct ExperimentRequest {
    Condition condition = Condition::many_likes;
    std::string participant_login;
    std::string participant_password;
    std::string participant_display_name;
    ProfileCard participant_profile;
    /// Defaults to the current time.
    std::optional<Instant> start_instant;
    FixtureFiles fixture = default_fixture_files();
    int day_count = 5;
    ValidationOptions validation;
    std::optional<FeatureFlags> flags;
    /// Defaults to the two bundled advertisements.
    std::optional<std::vector<Advertisement>> ads;
};

struct ExperimentCreation {
    ValidationReport report;
    /// Absent when the fixture failed validation; nothing was created then.
    std::optional<Experiment> experiment;
    std::size_t scheduled_events = 0;
};

struct ExperimentSummary {
    Experiment experiment;
    std::string participant_login;
    FeatureFlags flags;
    TreatmentLedger ledger;
    std::size_t events_pending = 0;
    std::size_t events_done = 0;
    std::size_t events_skipped = 0;
    std::size_t posts = 0;
    std::size_t reactions = 0;
};

struct ExportOptions {
    /// Display names are blank in the profiles table unless set.
    bool include_display_names = false;
};

/// Table name (without ".csv") to CSV text.
struct ExportBundle {
    std::map<std::string, std::string> tables;
};

/// The study platform: accounts, experiments, content, telemetry.
///
/// Every account belongs to at most one experiment and participant calls
/// only ever see their own experiment. Calls are thread-safe. Bot activity
/// runs through each experiment's runner, ticked lazily on participant
/// requests and by tick_all().
class Platform final : public ActionSink {
public:
    /// Loads existing state from `store`.
    Platform(PlatformConfig config, const Clock& clock, std::unique_ptr<Store> store);
    ~Platform() override;

    Platform(const Platform&) = delete;
    Platform& operator=(const Platform&) = delete;

    const Clock& clock() const noexcept { return clock_; }
    const InstrumentSet& instruments() const noexcept { return config_.instruments; }

    // Identity. Unknown login or wrong password -> auth; bot login -> forbidden.
    LoginResult login(std::string_view login, std::string_view password);
    /// Throws auth for unknown, ended or idle-expired sessions.
    AuthContext authenticate(std::string_view token);
    void end_session(std::string_view token);

    // Participant operations; an admin token gets forbidden.
    Feed feed(std::string_view token);
    CreatedPost create_post(std::string_view token, std::string_view body);
    ReactionCounts react(std::string_view token, const PostId& post, ReactionKind kind);
    ReactionCounts unreact(std::string_view token, const PostId& post, ReactionKind kind);
    /// Negative durations are rejected; long ones are clamped.
    ViewEvent record_view(std::string_view token, const PostId& post, std::int64_t duration_ms);
    AdClickEvent record_ad_click(std::string_view token, const AdId& ad);
    std::vector<Advertisement> ads(std::string_view token);
    ProfileView profile(std::string_view token, const AccountId& account);
    /// Stores answers, replacing earlier answers to the same items. Throws
    /// validation listing every unknown, out-of-phase or out-of-range item.
    void submit_survey(std::string_view token, SurveyPhase phase, const std::map<std::string, int>& answers);

    // Administration; callers authorize.
    ExperimentCreation create_experiment(const ExperimentRequest& request);
    std::vector<ExperimentSummary> experiments();
    ExperimentSummary experiment(const ExperimentId& id);
    FeatureFlags flags(const ExperimentId& id);
    FeatureFlags set_flags(const ExperimentId& id, const FeatureFlags& flags);
    ExportBundle export_experiment(const ExperimentId& id, const ExportOptions& options = {});
    ComplianceReport compliance(const ExperimentId& id, const ComplianceRules& rules = {});
    std::vector<ScheduledEvent> events(const ExperimentId& id);

    /// Runs due events in every experiment and closes idle sessions. Returns
    /// the number of executed events.
    std::size_t tick_all();

    // ActionSink
    PostId create_bot_post(const Experiment& experiment, const PlannedPost& plan, Instant at) override;
    void apply_bot_like(const Experiment& experiment, int bot_index, const PostId& target, Instant at) override;

private:
    struct AccountEntry;
    struct ExperimentData;

    void load();
    void bootstrap_admin();
    AuthContext authenticate_locked(std::string_view token, Instant now);
    AuthContext participant(std::string_view token);
    ExperimentData& data_locked(const ExperimentId& id);
    std::size_t tick(ExperimentData& data);
    void persist_runner(ExperimentData& data);
    void close_idle_sessions_locked(Instant now);
    void persist(std::vector<Mutation> batch);

    PlatformConfig config_;
    const Clock& clock_;
    std::unique_ptr<Store> store_;

    mutable std::mutex mutex_;
    std::map<AccountId, std::unique_ptr<AccountEntry>> accounts_;
    std::map<std::string, AccountId, std::less<>> logins_;
    std::map<ExperimentId, std::unique_ptr<ExperimentData>> experiments_;
    /// Sessions of accounts outside any experiment (admins).
    std::vector<Session> admin_sessions_;
    /// Token digest -> session.
    std::map<std::string, std::pair<SessionId, std::optional<ExperimentId>>, std::less<>> tokens_;

    IdSequence account_ids_{"acc-"};
    IdSequence experiment_ids_{"exp-"};
    IdSequence post_ids_{"post-"};
    IdSequence reaction_ids_{"rx-"};
    IdSequence session_ids_{"ses-"};
    IdSequence view_ids_{"view-"};
    IdSequence click_ids_{"click-"};
};

/// Parses and validates uploaded fixture files without creating anything.
/// Parse problems become errors of a failing report.
ValidationReport validate_fixture_files(const FixtureFiles& files, Condition condition, int day_count = 5,
                                        const ValidationOptions& options = {});

/// Writes `<dir>/<table>.csv` for every table, creating `dir`.
void write_export(const ExportBundle& bundle, const std::filesystem::path& dir);

}  // namespace fakebook
