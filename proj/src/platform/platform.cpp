#include "fakebook/platform/platform.hpp"

#include "fakebook/core/csv.hpp"
#include "fakebook/core/error.hpp"
#include "fakebook/core/text.hpp"
#include "fakebook/domain/export_schema.hpp"
#include "fakebook/domain/feed.hpp"
#include "fakebook/platform/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace fakebook {

using nlohmann::json;

struct Platform::AccountEntry {
    Account account;
    std::string login;
    std::optional<ExperimentId> experiment_id;
};

struct Platform::ExperimentData {
    /// Identity fields; `state` is only current in the runner.
    Experiment experiment;
    std::unique_ptr<ExperimentRunner> runner;
    FixtureFiles fixture_files;
    ValidationOptions validation;
    FeatureFlags flags;
    std::vector<Advertisement> ads;
    std::string participant_login;

    std::vector<Post> posts;
    std::map<PostId, std::size_t> post_index;
    std::map<std::string, PostId> plan_posts;
    ReactionLedger reactions;
    FriendGraph friends;
    std::vector<Session> sessions;
    std::vector<ViewEvent> views;
    std::vector<AdClickEvent> clicks;
    std::map<std::tuple<AccountId, SurveyPhase, std::string>, int> survey;

    std::mutex persist_mutex;
    json last_runner_doc;
    std::atomic<ExperimentState> last_state{ExperimentState::created};

    bool member(const AccountId& id) const {
        return id == experiment.participant_id || experiment.bot_index_of(id) != 0;
    }
    const Post* find_post(const PostId& id) const {
        auto it = post_index.find(id);
        return it == post_index.end() ? nullptr : &posts[it->second];
    }
    void add_post(Post post, const std::string& plan_id) {
        reactions.register_post(post.post_id, post.author_id);
        if (!plan_id.empty()) plan_posts[plan_id] = post.post_id;
        post_index[post.post_id] = posts.size();
        posts.push_back(std::move(post));
    }
    bool visible_to(const AccountId& viewer, const Post& post) const {
        return post.author_id == viewer || !flags.friends_only_feed || friends.are_friends(viewer, post.author_id);
    }
    json record() const {
        return {{"experiment", experiment},
                {"participant_login", participant_login},
                {"fixture", {{"bots_csv", fixture_files.bots_csv},
                             {"posts_csv", fixture_files.posts_csv},
                             {"likes_csv", fixture_files.likes_csv}}},
                {"require_study_profile", validation.require_study_profile},
                {"flags", flags},
                {"ads", ads}};
    }
};

namespace {

json with_experiment(json doc, const std::optional<ExperimentId>& id) {
    doc["experiment_id"] = id ? json(id->str()) : json(nullptr);
    return doc;
}

std::string survey_key(const AccountId& account, SurveyPhase phase, std::string_view item) {
    return fmt::format("{}|{}|{}", account.str(), to_string(phase), item);
}

std::string edge_key(const ExperimentId& exp, const FriendEdge& e) {
    return fmt::format("{}|{}|{}", exp.str(), e.a.str(), e.b.str());
}

void require_utf8_text(std::string_view text, std::string_view what) {
    if (!is_valid_utf8(text)) fail(ErrorCode::validation, fmt::format("{} is not valid UTF-8", what));
}

}  // namespace

ValidationReport validate_fixture_files(const FixtureFiles& files, Condition condition, int day_count,
                                        const ValidationOptions& options) {
    auto parsed = parse_fixture(files);
    if (!parsed.ok()) {
        ValidationReport report;
        report.status = ValidationStatus::fail;
        for (const auto& issue : parsed.issues) report.errors.push_back(issue.to_string());
        return report;
    }
    return validate_fixture(parsed.records.front(), condition, day_count, options);
}

void write_export(const ExportBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : bundle.tables) {
        const auto path = dir / (name + ".csv");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::internal, fmt::format("cannot write '{}'", path.string()));
        out << text;
    }
}

// ---------------------------------------------------------------------------

Platform::Platform(PlatformConfig config, const Clock& clock, std::unique_ptr<Store> store)
    : config_(std::move(config)), clock_(clock), store_(std::move(store)) {
    if (!store_) store_ = std::make_unique<MemoryStore>();
    load();
    bootstrap_admin();
}

Platform::~Platform() = default;

void Platform::persist(std::vector<Mutation> batch) { store_->apply(batch); }

void Platform::load() {
    std::map<std::string, std::vector<StoredRecord>> by_kind;
    for (auto& r : store_->load_all()) by_kind[r.kind].push_back(std::move(r));

    for (const auto& r : by_kind["account"]) {
        auto entry = std::make_unique<AccountEntry>();
        entry->account = r.body.get<Account>();
        entry->login = r.body.value("login", "");
        if (!r.body.at("experiment_id").is_null()) entry->experiment_id = r.body.at("experiment_id").get<ExperimentId>();
        account_ids_.observe(entry->account.account_id.str());
        if (!entry->login.empty()) logins_[entry->login] = entry->account.account_id;
        accounts_[entry->account.account_id] = std::move(entry);
    }

    std::map<std::string, RunnerState> runners;
    for (const auto& r : by_kind["runner"]) runners[r.id] = r.body.get<RunnerState>();

    for (const auto& r : by_kind["experiment"]) {
        auto data = std::make_unique<ExperimentData>();
        data->experiment = r.body.at("experiment").get<Experiment>();
        data->participant_login = r.body.value("participant_login", "");
        const auto& fx = r.body.at("fixture");
        data->fixture_files = {fx.at("bots_csv").get<std::string>(), fx.at("posts_csv").get<std::string>(),
                               fx.at("likes_csv").get<std::string>()};
        data->validation.require_study_profile = r.body.value("require_study_profile", false);
        r.body.at("flags").get_to(data->flags);
        data->ads = r.body.at("ads").get<std::vector<Advertisement>>();

        auto parsed = parse_fixture(data->fixture_files);
        if (!parsed.ok())
            fail(ErrorCode::schema, fmt::format("stored fixture of '{}' no longer parses", r.id));
        auto verdict = check_fixture(std::move(parsed.records.front()), data->experiment.condition,
                                     data->experiment.day_count, data->validation);
        if (!verdict.fixture)
            fail(ErrorCode::schema, fmt::format("stored fixture of '{}' no longer validates", r.id));
        auto state = runners.find(r.id);
        if (state == runners.end()) fail(ErrorCode::schema, fmt::format("experiment '{}' has no runner state", r.id));
        data->runner =
            std::make_unique<ExperimentRunner>(state->second, std::move(*verdict.fixture), config_.grant_policy);
        data->last_runner_doc = json(state->second);
        data->last_state = state->second.experiment.state;

        data->friends.add_account(data->experiment.participant_id);
        for (const auto& bot : data->experiment.bot_ids) data->friends.add_account(bot);
        experiment_ids_.observe(r.id);
        experiments_[data->experiment.experiment_id] = std::move(data);
    }

    auto owner = [&](const StoredRecord& r) -> ExperimentData& {
        return data_locked(r.body.at("experiment_id").get<ExperimentId>());
    };
    for (const auto& r : by_kind["friend_edge"])
        owner(r).friends.befriend(r.body.at("a").get<AccountId>(), r.body.at("b").get<AccountId>());
    for (const auto& r : by_kind["post"]) {
        owner(r).add_post(r.body.get<Post>(), r.body.value("plan_id", ""));
        post_ids_.observe(r.id);
    }
    for (const auto& r : by_kind["reaction"]) {
        owner(r).reactions.upsert(r.body.get<Reaction>());
        reaction_ids_.observe(r.id);
    }
    for (const auto& r : by_kind["session"]) {
        auto s = r.body.get<Session>();
        session_ids_.observe(r.id);
        std::optional<ExperimentId> exp;
        if (!r.body.at("experiment_id").is_null()) exp = r.body.at("experiment_id").get<ExperimentId>();
        if (!s.token_digest.empty()) tokens_[s.token_digest] = {s.session_id, exp};
        if (exp)
            data_locked(*exp).sessions.push_back(std::move(s));
        else
            admin_sessions_.push_back(std::move(s));
    }
    for (const auto& r : by_kind["view"]) {
        owner(r).views.push_back(r.body.get<ViewEvent>());
        view_ids_.observe(r.id);
    }
    for (const auto& r : by_kind["ad_click"]) {
        owner(r).clicks.push_back(r.body.get<AdClickEvent>());
        click_ids_.observe(r.id);
    }
    for (const auto& r : by_kind["survey"]) {
        owner(r).survey[{r.body.at("account_id").get<AccountId>(),
                         parse_survey_phase(r.body.at("phase").get<std::string>()),
                         r.body.at("item_key").get<std::string>()}] = r.body.at("value").get<int>();
    }
    if (!accounts_.empty())
        spdlog::info("loaded {} accounts and {} experiments", accounts_.size(), experiments_.size());
}

void Platform::bootstrap_admin() {
    if (config_.admin_login.empty()) return;
    std::lock_guard lock(mutex_);
    if (logins_.contains(config_.admin_login)) return;
    if (config_.admin_password.empty()) fail(ErrorCode::validation, "admin password must not be empty");
    auto entry = std::make_unique<AccountEntry>();
    entry->account.account_id = AccountId(account_ids_.next());
    entry->account.role = Role::admin;
    entry->account.display_name = config_.admin_login;
    entry->account.credential_hash = credentials::hash_password(config_.admin_password, config_.password_iterations);
    entry->login = config_.admin_login;
    json doc = entry->account;
    doc["login"] = entry->login;
    store_->put("account", entry->account.account_id.str(), with_experiment(doc, std::nullopt));
    logins_[entry->login] = entry->account.account_id;
    accounts_[entry->account.account_id] = std::move(entry);
    spdlog::info("created admin account '{}'", config_.admin_login);
}

Platform::ExperimentData& Platform::data_locked(const ExperimentId& id) {
    auto it = experiments_.find(id);
    if (it == experiments_.end()) fail(ErrorCode::not_found, fmt::format("unknown experiment '{}'", id.str()));
    return *it->second;
}

// ---------------------------------------------------------------------------
// Identity

LoginResult Platform::login(std::string_view login, std::string_view password) {
    std::string hash;
    AccountId account_id;
    {
        std::lock_guard lock(mutex_);
        auto it = logins_.find(login);
        if (it == logins_.end()) fail(ErrorCode::auth, "invalid credentials");
        const auto& entry = *accounts_.at(it->second);
        if (entry.account.role == Role::bot) fail(ErrorCode::forbidden, "bot accounts cannot sign in");
        hash = entry.account.credential_hash;
        account_id = entry.account.account_id;
    }
    if (!credentials::verify_password(password, hash)) fail(ErrorCode::auth, "invalid credentials");

    std::lock_guard lock(mutex_);
    const auto now = clock_.now();
    const auto& entry = *accounts_.at(account_id);
    auto& sessions = entry.experiment_id ? data_locked(*entry.experiment_id).sessions : admin_sessions_;
    std::vector<Mutation> batch;
    for (auto& s : sessions) {
        if (s.account_id == account_id && s.open()) {
            s.ended_at = std::max(now, s.started_at);
            batch.push_back(Mutation::put("session", s.session_id.str(), with_experiment(s, entry.experiment_id)));
        }
    }
    LoginResult result;
    result.token = credentials::random_token();
    Session session{SessionId(session_ids_.next()), account_id, now, std::nullopt, now,
                    credentials::token_digest(result.token)};
    batch.push_back(Mutation::put("session", session.session_id.str(), with_experiment(session, entry.experiment_id)));
    persist(std::move(batch));
    tokens_[session.token_digest] = {session.session_id, entry.experiment_id};
    result.context = {session.session_id, account_id, entry.account.role, entry.experiment_id};
    sessions.push_back(std::move(session));
    return result;
}

AuthContext Platform::authenticate_locked(std::string_view token, Instant now) {
    if (token.empty()) fail(ErrorCode::auth, "missing bearer token");
    auto it = tokens_.find(credentials::token_digest(token));
    if (it == tokens_.end()) fail(ErrorCode::auth, "invalid token");
    const auto& [session_id, exp] = it->second;
    auto& sessions = exp ? data_locked(*exp).sessions : admin_sessions_;
    auto s = std::find_if(sessions.begin(), sessions.end(), [&](const auto& x) { return x.session_id == session_id; });
    if (s == sessions.end()) fail(ErrorCode::auth, "invalid token");
    if (!s->open()) fail(ErrorCode::auth, "session has ended");
    if (now - s->last_seen > config_.session_idle_timeout) {
        s->ended_at = s->last_seen;
        store_->put("session", s->session_id.str(), with_experiment(*s, exp));
        fail(ErrorCode::auth, "session expired");
    }
    if (now > s->last_seen) {
        s->last_seen = now;
        store_->put("session", s->session_id.str(), with_experiment(*s, exp));
    }
    return {s->session_id, s->account_id, accounts_.at(s->account_id)->account.role, exp};
}

AuthContext Platform::authenticate(std::string_view token) {
    std::lock_guard lock(mutex_);
    return authenticate_locked(token, clock_.now());
}

AuthContext Platform::participant(std::string_view token) {
    ExperimentData* data = nullptr;
    AuthContext ctx;
    {
        std::lock_guard lock(mutex_);
        ctx = authenticate_locked(token, clock_.now());
        if (ctx.role != Role::participant || !ctx.experiment_id)
            fail(ErrorCode::forbidden, "only participants can use this endpoint");
        data = &data_locked(*ctx.experiment_id);
    }
    tick(*data);
    return ctx;
}

void Platform::end_session(std::string_view token) {
    std::lock_guard lock(mutex_);
    const auto now = clock_.now();
    const auto ctx = authenticate_locked(token, now);
    auto& sessions = ctx.experiment_id ? data_locked(*ctx.experiment_id).sessions : admin_sessions_;
    for (auto& s : sessions) {
        if (s.session_id == ctx.session_id) {
            s.ended_at = std::max(now, s.started_at);
            store_->put("session", s.session_id.str(), with_experiment(s, ctx.experiment_id));
        }
    }
}

void Platform::close_idle_sessions_locked(Instant now) {
    std::vector<Mutation> batch;
    auto sweep = [&](std::vector<Session>& sessions, const std::optional<ExperimentId>& exp) {
        for (auto& s : sessions) {
            if (s.open() && now - s.last_seen > config_.session_idle_timeout) {
                s.ended_at = s.last_seen;
                batch.push_back(Mutation::put("session", s.session_id.str(), with_experiment(s, exp)));
            }
        }
    };
    sweep(admin_sessions_, std::nullopt);
    for (auto& [id, data] : experiments_) sweep(data->sessions, id);
    if (!batch.empty()) persist(std::move(batch));
}

// ---------------------------------------------------------------------------
// Participant operations

Feed Platform::feed(std::string_view token) {
    const auto ctx = participant(token);
    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    Feed feed;
    feed.flags = data.flags;
    for (auto& post : visible_posts(ctx.account_id, data.flags, data.friends, data.posts)) {
        FeedItem item;
        item.author_name = accounts_.at(post.author_id)->account.display_name;
        item.counts = data.reactions.counts(post.post_id);
        item.like_count = item.counts.likes;
        for (const auto& liker : data.reactions.likers(post.post_id))
            item.likers.emplace_back(liker, accounts_.at(liker)->account.display_name);
        item.liked_by_viewer = data.reactions.has(ctx.account_id, post.post_id, ReactionKind::like);
        item.post = std::move(post);
        feed.items.push_back(std::move(item));
    }
    return feed;
}

CreatedPost Platform::create_post(std::string_view token, std::string_view body) {
    const auto ctx = participant(token);
    if (body.empty()) fail(ErrorCode::validation, "post body must not be empty");
    require_utf8_text(body, "post body");

    ExperimentData* data = nullptr;
    CreatedPost created;
    {
        std::lock_guard lock(mutex_);
        data = &data_locked(*ctx.experiment_id);
        created.post = {PostId(post_ids_.next()), ctx.account_id, std::string(body), clock_.now(),
                        PostOrigin::participant};
        store_->put("post", created.post.post_id.str(), with_experiment(created.post, ctx.experiment_id));
        data->add_post(created.post, {});
    }
    created.char_count = utf8_length(body);
    created.sub_threshold = created.char_count < ComplianceRules{}.min_post_chars;
    try {
        for (const auto& e : data->runner->on_participant_post(created.post))
            if (e.source == LikeSource::treatment_grant) ++created.likes_scheduled;
    } catch (const Error& e) {
        spdlog::error("like grant for post {} rejected: {}", created.post.post_id.str(), e.what());
    }
    persist_runner(*data);
    tick(*data);
    return created;
}

ReactionCounts Platform::react(std::string_view token, const PostId& post_id, ReactionKind kind) {
    const auto ctx = participant(token);
    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    const auto* post = data.find_post(post_id);
    if (!post || !data.visible_to(ctx.account_id, *post))
        fail(ErrorCode::not_found, fmt::format("unknown post '{}'", post_id.str()));
    if (post->author_id == ctx.account_id) fail(ErrorCode::forbidden, "cannot react to your own post");
    if (!data.reactions.has(ctx.account_id, post_id, kind)) {
        Reaction r{ReactionId(reaction_ids_.next()), ctx.account_id, post_id, kind, clock_.now()};
        if (data.reactions.upsert(r) == UpsertOutcome::inserted)
            store_->put("reaction", r.reaction_id.str(), with_experiment(r, ctx.experiment_id));
    }
    return data.reactions.counts(post_id);
}

ReactionCounts Platform::unreact(std::string_view token, const PostId& post_id, ReactionKind kind) {
    const auto ctx = participant(token);
    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    const auto* post = data.find_post(post_id);
    if (!post || !data.visible_to(ctx.account_id, *post))
        fail(ErrorCode::not_found, fmt::format("unknown post '{}'", post_id.str()));
    for (const auto& r : data.reactions.on_post(post_id)) {
        if (r.actor_id == ctx.account_id && r.kind == kind) {
            const Mutation m = Mutation::erase("reaction", r.reaction_id.str());
            store_->apply({&m, 1});
            data.reactions.retract(ctx.account_id, post_id, kind);
        }
    }
    return data.reactions.counts(post_id);
}

ViewEvent Platform::record_view(std::string_view token, const PostId& post_id, std::int64_t duration_ms) {
    const auto ctx = participant(token);
    if (duration_ms < 0) fail(ErrorCode::validation, "view duration must not be negative");
    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    const auto* post = data.find_post(post_id);
    if (!post || !data.visible_to(ctx.account_id, *post))
        fail(ErrorCode::not_found, fmt::format("unknown post '{}'", post_id.str()));
    const auto cap = std::chrono::duration_cast<std::chrono::milliseconds>(config_.max_view_duration).count();
    ViewEvent v{view_ids_.next(), ctx.session_id, post_id, std::min(duration_ms, cap), clock_.now()};
    store_->put("view", v.view_id, with_experiment(v, ctx.experiment_id));
    data.views.push_back(v);
    return v;
}

AdClickEvent Platform::record_ad_click(std::string_view token, const AdId& ad) {
    const auto ctx = participant(token);
    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    if (std::none_of(data.ads.begin(), data.ads.end(), [&](const auto& a) { return a.ad_id == ad; }))
        fail(ErrorCode::not_found, fmt::format("unknown advertisement '{}'", ad.str()));
    AdClickEvent c{click_ids_.next(), ctx.session_id, ad, clock_.now()};
    store_->put("ad_click", c.click_id, with_experiment(c, ctx.experiment_id));
    data.clicks.push_back(c);
    return c;
}

std::vector<Advertisement> Platform::ads(std::string_view token) {
    const auto ctx = participant(token);
    std::lock_guard lock(mutex_);
    return data_locked(*ctx.experiment_id).ads;
}

ProfileView Platform::profile(std::string_view token, const AccountId& account) {
    const auto ctx = participant(token);
    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    if (!data.member(account)) fail(ErrorCode::not_found, fmt::format("unknown account '{}'", account.str()));
    const auto& a = accounts_.at(account)->account;
    return {a.account_id, a.display_name, a.profile};
}

void Platform::submit_survey(std::string_view token, SurveyPhase phase, const std::map<std::string, int>& answers) {
    const auto ctx = participant(token);
    if (answers.empty()) fail(ErrorCode::validation, "no answers submitted");
    std::vector<std::string> problems;
    for (const auto& [key, value] : answers) {
        const auto* def = config_.instruments.owner_of(key);
        if (!def) {
            problems.push_back(fmt::format("unknown item '{}'", key));
            continue;
        }
        if (!def->phases().contains(phase))
            problems.push_back(fmt::format("item '{}' is not asked in phase {}", key, to_string(phase)));
        const auto* item = def->find(key);
        if (value < item->response_min || value > item->response_max)
            problems.push_back(fmt::format("item '{}' answer {} outside [{}, {}]", key, value, item->response_min,
                                           item->response_max));
    }
    if (!problems.empty()) fail(ErrorCode::validation, fmt::format("{}", fmt::join(problems, "; ")));

    std::lock_guard lock(mutex_);
    auto& data = data_locked(*ctx.experiment_id);
    std::vector<Mutation> batch;
    for (const auto& [key, value] : answers) {
        batch.push_back(Mutation::put("survey", survey_key(ctx.account_id, phase, key),
                                      {{"experiment_id", ctx.experiment_id->str()},
                                       {"account_id", ctx.account_id.str()},
                                       {"phase", to_string(phase)},
                                       {"item_key", key},
                                       {"value", value}}));
    }
    persist(std::move(batch));
    for (const auto& [key, value] : answers) data.survey[{ctx.account_id, phase, key}] = value;
}

// ---------------------------------------------------------------------------
// Administration

ExperimentCreation Platform::create_experiment(const ExperimentRequest& request) {
    if (request.participant_login.empty()) fail(ErrorCode::validation, "participant login must not be empty");
    if (request.participant_password.empty()) fail(ErrorCode::validation, "participant password must not be empty");
    if (request.day_count < 1 || request.day_count > 60)
        fail(ErrorCode::validation, fmt::format("day_count {} outside [1, 60]", request.day_count));
    require_utf8_text(request.participant_login, "login");

    ExperimentCreation result;
    auto parsed = parse_fixture(request.fixture);
    if (!parsed.ok()) {
        result.report = validate_fixture_files(request.fixture, request.condition, request.day_count,
                                               request.validation);
        return result;
    }
    auto bundle = std::move(parsed.records.front());
    auto bots = bundle.bots;
    std::sort(bots.begin(), bots.end(), [](const auto& a, const auto& b) { return a.bot_index < b.bot_index; });
    auto verdict = check_fixture(std::move(bundle), request.condition, request.day_count, request.validation);
    result.report = verdict.report;
    if (!verdict.fixture) return result;

    const auto hash = credentials::hash_password(request.participant_password, config_.password_iterations);

    std::lock_guard lock(mutex_);
    if (logins_.contains(request.participant_login))
        fail(ErrorCode::conflict, fmt::format("login '{}' is already taken", request.participant_login));

    auto data = std::make_unique<ExperimentData>();
    auto& exp = data->experiment;
    exp.experiment_id = ExperimentId(experiment_ids_.next());
    exp.condition = request.condition;
    exp.start_instant = request.start_instant.value_or(clock_.now());
    exp.day_count = request.day_count;
    exp.wrapup_day = request.day_count + 1;

    std::vector<std::unique_ptr<AccountEntry>> entries;
    auto participant = std::make_unique<AccountEntry>();
    participant->account = {AccountId(account_ids_.next()), Role::participant,
                            request.participant_display_name.empty() ? request.participant_login
                                                                     : request.participant_display_name,
                            request.participant_profile, hash};
    participant->login = request.participant_login;
    participant->experiment_id = exp.experiment_id;
    exp.participant_id = participant->account.account_id;
    entries.push_back(std::move(participant));
    for (const auto& bot : bots) {
        auto entry = std::make_unique<AccountEntry>();
        entry->account = {AccountId(account_ids_.next()), Role::bot, bot.display_name, bot.profile, {}};
        entry->login = fmt::format("{}-bot{}", exp.experiment_id.str(), bot.bot_index);
        entry->experiment_id = exp.experiment_id;
        exp.bot_ids.at(bot.bot_index - 1) = entry->account.account_id;
        entries.push_back(std::move(entry));
    }

    data->runner = std::make_unique<ExperimentRunner>(exp, std::move(*verdict.fixture), config_.grant_policy);
    const auto snapshot = data->runner->snapshot();
    result.scheduled_events = snapshot.events.size();
    data->last_runner_doc = json(snapshot);
    data->fixture_files = request.fixture;
    data->validation = request.validation;
    data->flags = request.flags.value_or(FeatureFlags{});
    data->ads = request.ads.value_or(data->runner->fixture().bundle().ads.empty()
                                         ? default_advertisements()
                                         : data->runner->fixture().bundle().ads);
    data->participant_login = request.participant_login;

    for (const auto& e : entries) data->friends.add_account(e->account.account_id);
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j)
            data->friends.befriend(entries[i]->account.account_id, entries[j]->account.account_id);

    std::vector<Mutation> batch;
    for (const auto& e : entries) {
        json doc = e->account;
        doc["login"] = e->login;
        batch.push_back(Mutation::put("account", e->account.account_id.str(), with_experiment(doc, exp.experiment_id)));
    }
    batch.push_back(Mutation::put("experiment", exp.experiment_id.str(), data->record()));
    batch.push_back(Mutation::put("runner", exp.experiment_id.str(), data->last_runner_doc));
    for (const auto& edge : data->friends.edges())
        batch.push_back(Mutation::put("friend_edge", edge_key(exp.experiment_id, edge),
                                      {{"experiment_id", exp.experiment_id.str()},
                                       {"a", edge.a.str()},
                                       {"b", edge.b.str()}}));
    persist(std::move(batch));

    for (auto& e : entries) {
        logins_[e->login] = e->account.account_id;
        const auto id = e->account.account_id;
        accounts_[id] = std::move(e);
    }
    result.experiment = exp;
    spdlog::info("created experiment {} ({}) for '{}'", exp.experiment_id.str(), to_string(exp.condition),
                 request.participant_login);
    experiments_[exp.experiment_id] = std::move(data);
    return result;
}

std::vector<ExperimentSummary> Platform::experiments() {
    std::vector<ExperimentId> ids;
    {
        std::lock_guard lock(mutex_);
        for (const auto& [id, data] : experiments_) ids.push_back(id);
    }
    std::vector<ExperimentSummary> out;
    for (const auto& id : ids) out.push_back(experiment(id));
    return out;
}

ExperimentSummary Platform::experiment(const ExperimentId& id) {
    ExperimentData* data = nullptr;
    {
        std::lock_guard lock(mutex_);
        data = &data_locked(id);
    }
    tick(*data);
    const auto snapshot = data->runner->snapshot();
    ExperimentSummary s;
    s.experiment = snapshot.experiment;
    s.ledger = snapshot.ledger;
    for (const auto& e : snapshot.events) {
        switch (e.status) {
            case EventStatus::pending: ++s.events_pending; break;
            case EventStatus::done: ++s.events_done; break;
            case EventStatus::skipped: ++s.events_skipped; break;
        }
    }
    std::lock_guard lock(mutex_);
    s.participant_login = data->participant_login;
    s.flags = data->flags;
    s.posts = data->posts.size();
    s.reactions = data->reactions.size();
    return s;
}

FeatureFlags Platform::flags(const ExperimentId& id) {
    std::lock_guard lock(mutex_);
    return data_locked(id).flags;
}

FeatureFlags Platform::set_flags(const ExperimentId& id, const FeatureFlags& flags) {
    std::lock_guard lock(mutex_);
    auto& data = data_locked(id);
    const auto previous = data.flags;
    data.flags = flags;
    try {
        store_->put("experiment", id.str(), data.record());
    } catch (...) {
        data.flags = previous;
        throw;
    }
    return data.flags;
}

std::vector<ScheduledEvent> Platform::events(const ExperimentId& id) {
    ExperimentData* data = nullptr;
    {
        std::lock_guard lock(mutex_);
        data = &data_locked(id);
    }
    return data->runner->events();
}

ExportBundle Platform::export_experiment(const ExperimentId& id, const ExportOptions& options) {
    ExperimentData* data = nullptr;
    {
        std::lock_guard lock(mutex_);
        data = &data_locked(id);
    }
    tick(*data);
    const auto exp = data->runner->experiment();

    std::lock_guard lock(mutex_);
    close_idle_sessions_locked(clock_.now());
    namespace es = export_schema;
    ExportBundle bundle;
    auto emit = [&](const es::Table& table, const std::vector<std::vector<std::string>>& rows) {
        bundle.tables[std::string(table.name)] = csv::write(table.header, rows);
    };
    std::vector<std::vector<std::string>> rows;

    auto posts = data->posts;
    std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
        return std::tie(a.created_at, a.post_id) < std::tie(b.created_at, b.post_id);
    });
    for (const auto& p : posts)
        rows.push_back({p.post_id.str(), p.author_id.str(), std::string(to_string(p.origin)),
                        format_instant(p.created_at), p.body});
    emit(es::kPosts, rows);

    rows.clear();
    for (const auto& r : data->reactions.all())
        rows.push_back({r.reaction_id.str(), r.actor_id.str(), r.post_id.str(), std::string(to_string(r.kind)),
                        format_instant(r.created_at)});
    emit(es::kReactions, rows);

    rows.clear();
    std::vector<AccountId> members{exp.participant_id};
    members.insert(members.end(), exp.bot_ids.begin(), exp.bot_ids.end());
    for (const auto& m : members) {
        const auto& a = accounts_.at(m)->account;
        rows.push_back({a.account_id.str(), std::string(to_string(a.role)),
                        options.include_display_names ? a.display_name : "", a.profile.gender,
                        a.profile.age ? std::to_string(*a.profile.age) : "", a.profile.nationality,
                        join(a.profile.interests, ";"), a.profile.bio});
    }
    emit(es::kProfiles, rows);

    rows.clear();
    for (const auto& s : data->sessions)
        rows.push_back({s.session_id.str(), s.account_id.str(), format_instant(s.started_at),
                        s.ended_at ? format_instant(*s.ended_at) : ""});
    emit(es::kSessions, rows);

    rows.clear();
    for (const auto& v : data->views)
        rows.push_back({v.session_id.str(), v.post_id.str(), std::to_string(v.duration_ms),
                        format_instant(v.recorded_at)});
    emit(es::kViews, rows);

    rows.clear();
    for (const auto& c : data->clicks)
        rows.push_back({c.session_id.str(), c.ad_id.str(), format_instant(c.clicked_at)});
    emit(es::kAdClicks, rows);

    rows.clear();
    for (const auto& e : data->friends.edges()) rows.push_back({e.a.str(), e.b.str()});
    emit(es::kFriendEdges, rows);

    rows.clear();
    for (const auto& [key, value] : data->survey) {
        const auto& [account, phase, item] = key;
        rows.push_back({account.str(), std::string(to_string(phase)), item, std::to_string(value)});
    }
    emit(es::kSurveyResponses, rows);

    rows.clear();
    rows.push_back({exp.experiment_id.str(), exp.participant_id.str(), std::string(to_string(exp.condition)),
                    format_instant(exp.start_instant), std::to_string(exp.day_count),
                    std::string(to_string(exp.state))});
    emit(es::kExperiment, rows);
    return bundle;
}

ComplianceReport Platform::compliance(const ExperimentId& id, const ComplianceRules& rules) {
    ExperimentData* data = nullptr;
    {
        std::lock_guard lock(mutex_);
        data = &data_locked(id);
    }
    tick(*data);
    const auto exp = data->runner->experiment();

    std::lock_guard lock(mutex_);
    std::vector<Post> posts;
    for (const auto& p : data->posts)
        if (p.author_id == exp.participant_id) posts.push_back(p);
    std::vector<Reaction> given;
    for (const auto& r : data->reactions.all())
        if (r.actor_id == exp.participant_id && r.kind == ReactionKind::like) given.push_back(r);
    std::vector<ActivitySpan> activity;
    for (const auto& s : data->sessions)
        if (s.account_id == exp.participant_id) activity.push_back({s.started_at, s.ended_at.value_or(s.last_seen)});
    return compliance_report(exp, posts, given, activity, rules);
}

// ---------------------------------------------------------------------------
// Scheduling

std::size_t Platform::tick(ExperimentData& data) {
    const auto executed = data.runner->tick(clock_.now(), *this);
    const auto state = data.runner->experiment().state;
    if (!executed.empty() || data.last_state.exchange(state) != state) persist_runner(data);
    return executed.size();
}

void Platform::persist_runner(ExperimentData& data) {
    std::lock_guard lock(data.persist_mutex);
    json doc = data.runner->snapshot();
    if (doc == data.last_runner_doc) return;
    store_->put("runner", data.experiment.experiment_id.str(), doc);
    data.last_runner_doc = std::move(doc);
}

std::size_t Platform::tick_all() {
    std::vector<ExperimentData*> all;
    {
        std::lock_guard lock(mutex_);
        for (auto& [id, data] : experiments_) all.push_back(data.get());
    }
    std::size_t executed = 0;
    for (auto* data : all) executed += tick(*data);
    std::lock_guard lock(mutex_);
    close_idle_sessions_locked(clock_.now());
    return executed;
}

PostId Platform::create_bot_post(const Experiment& experiment, const PlannedPost& plan, Instant at) {
    std::lock_guard lock(mutex_);
    auto& data = data_locked(experiment.experiment_id);
    if (auto it = data.plan_posts.find(plan.plan_id); it != data.plan_posts.end()) return it->second;
    Post post{PostId(post_ids_.next()), experiment.bot(plan.bot_index), plan.body, at, PostOrigin::bot_planned};
    auto doc = with_experiment(post, experiment.experiment_id);
    doc["plan_id"] = plan.plan_id;
    store_->put("post", post.post_id.str(), doc);
    const auto id = post.post_id;
    data.add_post(std::move(post), plan.plan_id);
    return id;
}

void Platform::apply_bot_like(const Experiment& experiment, int bot_index, const PostId& target, Instant at) {
    std::lock_guard lock(mutex_);
    auto& data = data_locked(experiment.experiment_id);
    const auto& actor = experiment.bot(bot_index);
    if (data.reactions.has(actor, target, ReactionKind::like)) return;
    Reaction r{ReactionId(reaction_ids_.next()), actor, target, ReactionKind::like, at};
    if (data.reactions.upsert(r) == UpsertOutcome::inserted)
        store_->put("reaction", r.reaction_id.str(), with_experiment(r, experiment.experiment_id));
}

}  // namespace fakebook
