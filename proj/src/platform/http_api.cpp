#include "fakebook/platform/http_api.hpp"

#include "fakebook/core/error.hpp"
#include "fakebook/core/text.hpp"
#include "fakebook/platform/serialize.hpp"
#include "fakebook/stats/report.hpp"

#include <httplib.h>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace fakebook {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::not_found: return 404;
        case ErrorCode::validation: return 400;
        case ErrorCode::auth: return 401;
        case ErrorCode::forbidden: return 403;
        case ErrorCode::conflict: return 409;
        case ErrorCode::schema: return 422;
        case ErrorCode::internal: return 500;
    }
    return 500;
}

ServerConfig ServerConfig::from_env(const std::function<const char*(const char*)>& lookup) {
    ServerConfig c;
    auto get = [&](const char* name) -> std::optional<std::string> {
        const char* v = lookup(name);
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
    auto integer = [&](const char* name, long long lo, long long hi) -> std::optional<int> {
        auto v = get(name);
        if (!v) return std::nullopt;
        auto n = parse_int(*v);
        if (!n || *n < lo || *n > hi)
            fail(ErrorCode::validation, fmt::format("{}='{}' is not an integer in [{}, {}]", name, *v, lo, hi));
        return static_cast<int>(*n);
    };
    if (auto v = get("FAKEBOOK_BIND")) c.bind = *v;
    if (auto v = integer("FAKEBOOK_PORT", 0, 65535)) c.port = *v;
    if (auto v = get("FAKEBOOK_DB")) c.db = *v;
    if (auto v = get("FAKEBOOK_ADMIN_USER")) c.admin_user = *v;
    if (auto v = get("FAKEBOOK_ADMIN_PASSWORD")) c.admin_password = *v;
    if (auto v = get("FAKEBOOK_VIRTUAL_CLOCK")) {
        if (*v == "1" || *v == "true") c.virtual_clock = true;
        else if (*v == "0" || *v == "false") c.virtual_clock = false;
        else fail(ErrorCode::validation, fmt::format("FAKEBOOK_VIRTUAL_CLOCK='{}' must be 0/1/true/false", *v));
    }
    if (auto v = get("FAKEBOOK_VIRTUAL_START")) {
        c.virtual_start = parse_instant(*v);
        if (!c.virtual_start) fail(ErrorCode::validation, fmt::format("FAKEBOOK_VIRTUAL_START='{}' is not ISO-8601", *v));
    }
    if (auto v = integer("FAKEBOOK_PBKDF2_ITERATIONS", 1, 10'000'000)) c.password_iterations = *v;
    return c;
}

namespace {

json error_body(ErrorCode code, std::string_view message) {
    return {{"error", {{"code", to_string(code)}, {"message", message}}}};
}

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::string bearer(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return {};
    return header.substr(prefix.size());
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) fail(ErrorCode::validation, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        fail(ErrorCode::validation, fmt::format("malformed JSON: {}", e.what()));
    }
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorCode::validation, fmt::format("missing field '{}'", key));
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::validation, fmt::format("field '{}' has the wrong type", key));
    }
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
        try {
            h(req, res);
        } catch (const Error& e) {
            send(res, http_status(e.code()), error_body(e.code(), e.what()));
        } catch (const json::exception& e) {
            send(res, 400, error_body(ErrorCode::validation, e.what()));
        } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
            send(res, 500, error_body(ErrorCode::internal, "internal error"));
        }
    };
}

json post_json(const Post& p) {
    return {{"post_id", p.post_id.str()},
            {"author_id", p.author_id.str()},
            {"body", p.body},
            {"created_at", format_instant(p.created_at)},
            {"origin", to_string(p.origin)}};
}

json counts_json(const ReactionCounts& c, bool all) {
    json j = {{"like_count", c.likes}};
    if (all) {
        j["dislike_count"] = c.dislikes;
        j["flag_count"] = c.flags;
    }
    return j;
}

json summary_json(const ExperimentSummary& s) {
    return {{"experiment", s.experiment},
            {"participant_login", s.participant_login},
            {"flags", s.flags},
            {"ledger", s.ledger},
            {"events", {{"pending", s.events_pending}, {"done", s.events_done}, {"skipped", s.events_skipped}}},
            {"posts", s.posts},
            {"reactions", s.reactions}};
}

json compliance_json(const ComplianceReport& r) {
    auto days = json::array();
    for (const auto& d : r.days)
        days.push_back({{"day", d.day},
                        {"posted", d.posted},
                        {"post_chars", d.post_chars},
                        {"likes_given", d.likes_given},
                        {"active_seconds", d.active_seconds},
                        {"compliant", d.compliant}});
    return {{"days", days},
            {"wrapup_active_seconds", r.wrapup_active_seconds},
            {"wrapup_compliant", r.wrapup_compliant},
            {"overall", r.overall}};
}

FixtureFiles fixture_from(const json& j) {
    return {field<std::string>(j, "bots_csv"), field<std::string>(j, "posts_csv"), field<std::string>(j, "likes_csv")};
}

ReactionKind kind_from(const httplib::Request& req) {
    if (req.has_param("kind")) return parse_reaction_kind(req.get_param_value("kind"));
    const auto body = body_of(req);
    return body.contains("kind") ? parse_reaction_kind(field<std::string>(body, "kind")) : ReactionKind::like;
}

stats::StudyData study_data(Platform& platform) {
    stats::StudyData data;
    for (const auto& s : platform.experiments()) {
        const auto bundle = platform.export_experiment(s.experiment.experiment_id);
        data.merge(stats::parse_study_tables(bundle.tables.at("experiment"), bundle.tables.at("survey_responses")));
    }
    return data;
}

}  // namespace

void mount_api(httplib::Server& server, Platform& platform, VirtualClock* virtual_clock) {
    auto admin = [&platform](const httplib::Request& req) {
        const auto ctx = platform.authenticate(bearer(req));
        if (ctx.role != Role::admin) fail(ErrorCode::forbidden, "administrator access required");
        return ctx;
    };
    auto experiment_id = [](const httplib::Request& req) { return ExperimentId(req.matches[1].str()); };

    server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"status", "ok"}}); }));

    // -- participant API ----------------------------------------------------

    server.Post("/api/login", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto r = platform.login(field<std::string>(body, "login"), field<std::string>(body, "password"));
        send(res, 200,
             {{"token", r.token},
              {"session_id", r.context.session_id.str()},
              {"account_id", r.context.account_id.str()},
              {"role", to_string(r.context.role)},
              {"experiment_id", r.context.experiment_id ? json(r.context.experiment_id->str()) : json(nullptr)}});
    }));

    server.Get("/api/session", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto ctx = platform.authenticate(bearer(req));
        json body = {{"session_id", ctx.session_id.str()},
                     {"account_id", ctx.account_id.str()},
                     {"role", to_string(ctx.role)},
                     {"experiment_id", ctx.experiment_id ? json(ctx.experiment_id->str()) : json(nullptr)}};
        if (ctx.experiment_id) body["flags"] = platform.flags(*ctx.experiment_id);
        send(res, 200, body);
    }));

    server.Post("/api/session/end", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        platform.end_session(bearer(req));
        send(res, 200, {{"ended", true}});
    }));

    server.Get("/api/feed", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto feed = platform.feed(bearer(req));
        auto posts = json::array();
        for (const auto& item : feed.items) {
            auto j = post_json(item.post);
            j["author_name"] = item.author_name;
            j.update(counts_json(item.counts, feed.flags.show_dislike_flag_counts));
            auto likers = json::array();
            for (const auto& [id, name] : item.likers) likers.push_back({{"account_id", id.str()}, {"display_name", name}});
            j["likers"] = likers;
            j["liked_by_me"] = item.liked_by_viewer;
            posts.push_back(std::move(j));
        }
        send(res, 200, {{"posts", posts}, {"flags", feed.flags}});
    }));

    server.Post("/api/posts", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto created = platform.create_post(bearer(req), field<std::string>(body, "body"));
        auto j = post_json(created.post);
        j["char_count"] = created.char_count;
        j["sub_threshold"] = created.sub_threshold;
        send(res, 201, j);
    }));

    server.Post(R"(/api/posts/([^/]+)/reactions)", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto kind = parse_reaction_kind(field<std::string>(body, "kind"));
        const auto counts = platform.react(bearer(req), PostId(req.matches[1].str()), kind);
        send(res, 200, counts_json(counts, true));
    }));

    server.Delete(R"(/api/posts/([^/]+)/reactions)", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto counts = platform.unreact(bearer(req), PostId(req.matches[1].str()), kind_from(req));
        send(res, 200, counts_json(counts, true));
    }));

    server.Post("/api/telemetry/views", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto v = platform.record_view(bearer(req), PostId(field<std::string>(body, "post_id")),
                                            field<std::int64_t>(body, "duration_ms"));
        send(res, 201, {{"post_id", v.post_id.str()}, {"duration_ms", v.duration_ms},
                        {"recorded_at", format_instant(v.recorded_at)}});
    }));

    server.Post("/api/telemetry/ad-clicks", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto c = platform.record_ad_click(bearer(req), AdId(field<std::string>(body, "ad_id")));
        send(res, 201, {{"ad_id", c.ad_id.str()}, {"clicked_at", format_instant(c.clicked_at)}});
    }));

    server.Get("/api/ads", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        send(res, 200, {{"ads", platform.ads(bearer(req))}});
    }));

    server.Get(R"(/api/profiles/([^/]+))", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto p = platform.profile(bearer(req), AccountId(req.matches[1].str()));
        send(res, 200, {{"account_id", p.account_id.str()}, {"display_name", p.display_name}, {"profile", p.profile}});
    }));

    server.Get("/api/instruments", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        platform.authenticate(bearer(req));
        send(res, 200, platform.instruments().to_json());
    }));

    server.Post("/api/surveys", guarded([&platform](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto phase = parse_survey_phase(field<std::string>(body, "phase"));
        const auto answers = field<std::map<std::string, int>>(body, "answers");
        platform.submit_survey(bearer(req), phase, answers);
        send(res, 201, {{"phase", to_string(phase)}, {"stored", answers.size()}});
    }));

    // -- admin API -------------------------------------------------------------

    server.Post("/admin/experiments", guarded([&platform, admin](const httplib::Request& req, httplib::Response& res) {
        admin(req);
        const auto body = body_of(req);
        ExperimentRequest r;
        r.condition = parse_condition(field<std::string>(body, "condition"));
        const auto participant = field<json>(body, "participant");
        r.participant_login = field<std::string>(participant, "login");
        r.participant_password = field<std::string>(participant, "password");
        r.participant_display_name = participant.value("display_name", "");
        if (participant.contains("profile")) r.participant_profile = participant.at("profile").get<ProfileCard>();
        if (body.contains("start_instant")) r.start_instant = instant_from(body.at("start_instant"));
        if (body.contains("day_count")) r.day_count = field<int>(body, "day_count");
        if (body.contains("fixture")) r.fixture = fixture_from(body.at("fixture"));
        if (body.contains("flags")) {
            FeatureFlags flags;
            body.at("flags").get_to(flags);
            r.flags = flags;
        }
        if (body.contains("ads")) r.ads = body.at("ads").get<std::vector<Advertisement>>();
        r.validation.require_study_profile = body.value("require_study_profile", false);

        const auto created = platform.create_experiment(r);
        if (!created.experiment) {
            send(res, 422, {{"report", created.report}});
            return;
        }
        send(res, 201, {{"experiment", *created.experiment},
                        {"report", created.report},
                        {"scheduled_events", created.scheduled_events}});
    }));

    server.Get("/admin/experiments", guarded([&platform, admin](const httplib::Request& req, httplib::Response& res) {
        admin(req);
        auto list = json::array();
        for (const auto& s : platform.experiments()) list.push_back(summary_json(s));
        send(res, 200, {{"experiments", list}});
    }));

    server.Get(R"(/admin/experiments/([^/]+))", guarded([&platform, admin, experiment_id](const httplib::Request& req, httplib::Response& res) {
        admin(req);
        send(res, 200, summary_json(platform.experiment(experiment_id(req))));
    }));

    server.Get(R"(/admin/experiments/([^/]+)/export)",
               guarded([&platform, admin, experiment_id](const httplib::Request& req, httplib::Response& res) {
                   admin(req);
                   ExportOptions options;
                   options.include_display_names = req.get_param_value("include_names") == "true";
                   const auto bundle = platform.export_experiment(experiment_id(req), options);
                   if (req.has_param("table")) {
                       const auto name = req.get_param_value("table");
                       auto it = bundle.tables.find(name);
                       if (it == bundle.tables.end())
                           fail(ErrorCode::not_found, fmt::format("unknown export table '{}'", name));
                       res.status = 200;
                       res.set_header("Content-Disposition", fmt::format("attachment; filename=\"{}.csv\"", name));
                       res.set_content(it->second, "text/csv; charset=utf-8");
                       return;
                   }
                   send(res, 200, {{"experiment_id", experiment_id(req).str()}, {"tables", bundle.tables}});
               }));

    server.Get(R"(/admin/experiments/([^/]+)/flags)",
               guarded([&platform, admin, experiment_id](const httplib::Request& req, httplib::Response& res) {
                   admin(req);
                   send(res, 200, platform.flags(experiment_id(req)));
               }));

    server.Put(R"(/admin/experiments/([^/]+)/flags)",
               guarded([&platform, admin, experiment_id](const httplib::Request& req, httplib::Response& res) {
                   admin(req);
                   const auto id = experiment_id(req);
                   auto flags = platform.flags(id);
                   body_of(req).get_to(flags);
                   send(res, 200, platform.set_flags(id, flags));
               }));

    server.Get(R"(/admin/experiments/([^/]+)/compliance)",
               guarded([&platform, admin, experiment_id](const httplib::Request& req, httplib::Response& res) {
                   admin(req);
                   send(res, 200, compliance_json(platform.compliance(experiment_id(req))));
               }));

    server.Get(R"(/admin/experiments/([^/]+)/events)",
               guarded([&platform, admin, experiment_id](const httplib::Request& req, httplib::Response& res) {
                   admin(req);
                   send(res, 200, {{"events", platform.events(experiment_id(req))}});
               }));

    server.Post("/admin/fixtures/validate", guarded([admin](const httplib::Request& req, httplib::Response& res) {
        admin(req);
        const auto body = body_of(req);
        const auto condition = parse_condition(body.value("condition", "MANY_LIKES"));
        ValidationOptions options;
        options.require_study_profile = body.value("require_study_profile", false);
        const auto report = validate_fixture_files(fixture_from(body), condition, body.value("day_count", 5), options);
        send(res, 200, report);
    }));

    server.Get("/admin/report", guarded([&platform, admin](const httplib::Request& req, httplib::Response& res) {
        admin(req);
        const auto report = stats::build_results_report(study_data(platform), platform.instruments());
        const auto format = req.has_param("format") ? req.get_param_value("format") : "json";
        if (format == "json") {
            send(res, 200, stats::to_json(report));
        } else if (format == "text") {
            res.set_content(stats::render_text(report), "text/plain; charset=utf-8");
        } else if (format == "csv") {
            res.set_content(stats::render_csv(report), "text/csv; charset=utf-8");
        } else {
            fail(ErrorCode::validation, fmt::format("unknown report format '{}'", format));
        }
    }));

    server.Post("/admin/clock/advance", guarded([&platform, admin, virtual_clock](const httplib::Request& req, httplib::Response& res) {
        if (!virtual_clock) fail(ErrorCode::not_found, "virtual clock mode is off");
        admin(req);
        const auto body = body_of(req);
        if (body.contains("to")) {
            const auto to = instant_from(body.at("to"));
            if (to < virtual_clock->now()) fail(ErrorCode::validation, "the clock cannot move backwards");
            virtual_clock->set(to);
        } else {
            const auto seconds = field<std::int64_t>(body, "seconds");
            if (seconds < 0) fail(ErrorCode::validation, "the clock cannot move backwards");
            virtual_clock->advance(std::chrono::seconds{seconds});
        }
        const auto executed = platform.tick_all();
        send(res, 200, {{"now", format_instant(virtual_clock->now())}, {"executed", executed}});
    }));
}

}  // namespace fakebook
