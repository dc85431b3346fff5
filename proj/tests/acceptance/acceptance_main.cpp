// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include "fakebook/core/csv.hpp"
#include "fakebook/core/error.hpp"
#include "fakebook/domain/export_schema.hpp"
#include "fakebook/measures/instrument.hpp"
#include "fakebook/platform/platform.hpp"
#include "fakebook/platform/simulation.hpp"
#include "fakebook/stats/nonparametric.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace fakebook;
using namespace std::chrono_literals;

namespace {

const Instant kStart = *parse_instant("2026-03-02T00:00:00Z");

struct Outcome {
    bool ok = true;
    std::vector<std::string> problems;

    void check(bool condition, std::string what) {
        if (condition) return;
        ok = false;
        if (problems.size() < 5) problems.push_back(std::move(what));
    }
};

PlatformConfig config() {
    PlatformConfig c;
    c.password_iterations = 1000;
    return c;
}

using Rows = std::vector<std::vector<std::string>>;

Rows rows(const ExportBundle& bundle, const export_schema::Table& t) {
    const auto records = csv::read(bundle.tables.at(std::string(t.name)));
    Rows out;
    for (std::size_t i = 1; i < records.size(); ++i) out.push_back(records[i].fields);
    return out;
}

/// Likes per participant post, keyed by post id, from an export.
std::map<std::string, int> likes_on_participant_posts(const ExportBundle& bundle, const std::string& participant) {
    std::map<std::string, int> likes;
    for (const auto& p : rows(bundle, export_schema::kPosts))
        if (p[1] == participant) likes[p[0]] = 0;
    for (const auto& r : rows(bundle, export_schema::kReactions))
        if (r[3] == "LIKE" && likes.contains(r[2])) ++likes[r[2]];
    return likes;
}

struct SimRun {
    VirtualClock clock{kStart - 1h};
    Platform platform{config(), clock, std::make_unique<MemoryStore>()};
    sim::StudySimulation simulation{platform, clock};
};

// 1 and 2
Outcome treatment(Condition condition) {
    Outcome o;
    SimRun run;
    const auto p = run.simulation.enrol(condition, "agent", {}, kStart);
    run.simulation.run();
    const auto participant = run.platform.experiment(p.experiment_id).experiment.participant_id.str();
    const auto bundle = run.platform.export_experiment(p.experiment_id);
    const auto likes = likes_on_participant_posts(bundle, participant);
    o.check(likes.size() == 5, fmt::format("{} participant posts", likes.size()));
    int total = 0;
    for (const auto& [id, n] : likes) total += n;
    if (condition == Condition::many_likes) {
        o.check(total == 24, fmt::format("total likes {}", total));
        for (const auto& [id, n] : likes) o.check(n == 4 || n == 5, fmt::format("{} has {} likes", id, n));
    } else {
        o.check(total == 1, fmt::format("total likes {}", total));
        // Post ids are issued in creation order.
        o.check(!likes.empty() && likes.begin()->second == 1, "first post does not hold the like");
    }
    return o;
}

// 3
Outcome bot_ecology() {
    Outcome o;
    SimRun run;
    const auto p = run.simulation.enrol(Condition::many_likes, "agent", {}, kStart);
    run.simulation.run();
    const auto exp = run.platform.experiment(p.experiment_id).experiment;
    const auto bundle = run.platform.export_experiment(p.experiment_id);
    std::map<std::string, std::string> author;
    for (const auto& r : rows(bundle, export_schema::kPosts)) author[r[0]] = r[1];
    std::map<std::string, int> sums;
    for (const auto& id : exp.bot_ids) sums[id.str()] = 0;
    for (const auto& r : rows(bundle, export_schema::kReactions)) {
        if (r[3] != "LIKE" || !sums.contains(r[1])) continue;
        const auto target = author.at(r[2]);
        if (sums.contains(target)) ++sums[target];
    }
    std::vector<int> sorted;
    for (const auto& [id, n] : sums) sorted.push_back(n);
    std::sort(sorted.begin(), sorted.end());
    const bool small_ok = sorted.size() == 6 && (sorted[0] == 2 || sorted[0] == 3) && (sorted[1] == 2 || sorted[1] == 3);
    o.check(small_ok && sorted[2] == 12 && sorted[3] == 12 && sorted[4] == 24 && sorted[5] == 24,
            fmt::format("bot like sums [{}]", fmt::join(sorted, ",")));
    return o;
}

// 4
Outcome table_consistency() {
    struct Row {
        const char* measure;
        double u_min;
        double r;
    };
    const std::array<Row, 8> table{{{"stress", 2477.0, -.31},
                                    {"sadness", 2590.0, -.28},
                                    {"anxiety", 2718.5, -.25},
                                    {"enjoyment", 1959.5, .46},
                                    {"belongingness", 596.5, .83},
                                    {"appraisal", 1392.0, .61},
                                    {"rejection", 851.0, -.76},
                                    {"situational_self_esteem", 2426.5, .33}}};
    constexpr double n = 85;
    const double tolerance = 0.005 * n * n / 2 + 0.05;
    Outcome o;
    for (const auto& row : table) {
        // r = 2 u_A / n^2 - 1, and u_min is u_A when r < 0.
        const double u_a = (row.r + 1) * n * n / 2;
        const double u_from_r = row.r < 0 ? u_a : n * n - u_a;
        o.check(std::abs(u_from_r - row.u_min) <= tolerance,
                fmt::format("{}: U from r {:.1f} vs {}", row.measure, u_from_r, row.u_min));
        const double reported_u_a = row.r < 0 ? row.u_min : n * n - row.u_min;
        const double r = stats::rank_biserial(reported_u_a, 85, 85);
        o.check(std::abs(r - row.r) <= 0.005 + 0.05 * 2 / (n * n),
                fmt::format("{}: r from U {:.4f} vs {}", row.measure, r, row.r));
    }
    return o;
}

long long doubled_u(const std::vector<double>& a, const std::vector<double>& b) {
    long long u = 0;
    for (double x : a)
        for (double y : b) u += x > y ? 2 : x == y ? 1 : 0;
    return u;
}

double brute_force_mwu_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto n = pooled.size();
    const auto observed = doubled_u(a, b);
    long long total = 0, le = 0, ge = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) continue;
        std::vector<double> ga, gb;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? ga : gb).push_back(pooled[i]);
        const auto u = doubled_u(ga, gb);
        ++total;
        le += u <= observed;
        ge += u >= observed;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

// 5
Outcome mann_whitney_oracle() {
    Outcome o;
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<int> size(1, 7), value(0, 5);
    const stats::TestOptions exact{stats::TestOptions::Choice::exact, false};
    int with_ties = 0;
    for (int k = 0; k < 500; ++k) {
        std::vector<double> a(size(rng)), b(size(rng));
        for (auto& x : a) x = value(rng);
        for (auto& x : b) x = value(rng);
        std::vector<double> pooled(a);
        pooled.insert(pooled.end(), b.begin(), b.end());
        with_ties += std::set<double>(pooled.begin(), pooled.end()).size() < pooled.size();
        const double p = stats::mann_whitney_u(a, b, exact).p_two_sided;
        const double expected = brute_force_mwu_p(a, b);
        o.check(std::abs(p - expected) <= 1e-12, fmt::format("case {}: exact {} vs enumeration {}", k, p, expected));
    }
    o.check(with_ties > 100, fmt::format("only {} cases with ties", with_ties));

    // The approximation runs with the continuity correction here.
    const stats::TestOptions approx{stats::TestOptions::Choice::normal_approx, true};
    std::vector<double> pool(20);
    std::iota(pool.begin(), pool.end(), 1.0);
    for (int k = 0; k < 500; ++k) {
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::vector<double> a(pool.begin(), pool.begin() + 10), b(pool.begin() + 10, pool.end());
        const double pe = stats::mann_whitney_u(a, b, exact).p_two_sided;
        const double pa = stats::mann_whitney_u(a, b, approx).p_two_sided;
        o.check(std::abs(pe - pa) <= 0.01, fmt::format("n=10,10 case {}: exact {} vs approx {}", k, pe, pa));
    }
    return o;
}

// 6
Outcome wilcoxon_oracle() {
    Outcome o;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(1, 10), coin(0, 1);
    std::uniform_real_distribution<double> base(-3, 3);
    const stats::TestOptions exact{stats::TestOptions::Choice::exact, false};
    std::vector<int> magnitudes(25);
    std::iota(magnitudes.begin(), magnitudes.end(), 1);
    for (int k = 0; k < 500; ++k) {
        const auto n = static_cast<std::size_t>(size(rng));
        std::shuffle(magnitudes.begin(), magnitudes.end(), rng);
        std::vector<double> pre(n), post(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = magnitudes[i] * (coin(rng) ? 1.0 : -1.0);
            pre[i] = std::round(base(rng) * 4);
            post[i] = pre[i] + d[i];
        }
        // Ranks of distinct |d| are their order positions.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto x, auto y) { return std::abs(d[x]) < std::abs(d[y]); });
        std::vector<int> rank(n);
        for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<int>(r) + 1;
        int observed = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (d[i] > 0) observed += rank[i];
        long long le = 0, ge = 0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            int w = 0;
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i) & 1) w += rank[i];
            le += w <= observed;
            ge += w >= observed;
        }
        const double expected = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / std::ldexp(1.0, static_cast<int>(n)));
        const double p = stats::wilcoxon_signed_rank(pre, post, exact).p_two_sided;
        o.check(std::abs(p - expected) <= 1e-12, fmt::format("case {}: exact {} vs enumeration {}", k, p, expected));
    }
    return o;
}

/// Lowest and highest attainable scores, choosing each item's answer freely.
std::pair<int, int> attainable_range(const InstrumentDefinition& def) {
    SurveyResponse low, high;
    for (const auto& item : def.items()) {
        int lo = item.response_min, hi = item.response_min;
        for (int v = item.response_min; v <= item.response_max; ++v) {
            if (recode(v, item) < recode(lo, item)) lo = v;
            if (recode(v, item) > recode(hi, item)) hi = v;
        }
        low.answers[item.item_key] = lo;
        high.answers[item.item_key] = hi;
    }
    return {score_scale(low, def), score_scale(high, def)};
}

// 7
Outcome scale_scoring() {
    Outcome o;
    const auto ucla = instruments::ucla_loneliness();
    const auto rosenberg = instruments::rosenberg_self_esteem();
    const auto [u_lo, u_hi] = attainable_range(ucla);
    const auto [r_lo, r_hi] = attainable_range(rosenberg);
    o.check(u_lo == 10 && u_hi == 50, fmt::format("UCLA range {}..{}", u_lo, u_hi));
    o.check(r_lo == 10 && r_hi == 40, fmt::format("Rosenberg range {}..{}", r_lo, r_hi));
    o.check(ucla.score_min() == 10 && ucla.score_max() == 50, "UCLA declared range");
    o.check(rosenberg.score_min() == 10 && rosenberg.score_max() == 40, "Rosenberg declared range");
    for (const auto* def : {&ucla, &rosenberg})
        for (auto item : def->items())
            for (bool reverse : {false, true}) {
                item.reverse = reverse;
                for (int v = item.response_min; v <= item.response_max; ++v)
                    o.check(recode(recode(v, item), item) == v, fmt::format("{} value {}", item.item_key, v));
            }
    return o;
}

// 8
Outcome isolation_and_export() {
    Outcome o;
    VirtualClock clock(kStart - 1h);
    Platform platform(config(), clock, std::make_unique<MemoryStore>());
    std::array<Experiment, 2> exps;
    for (int i = 0; i < 2; ++i) {
        ExperimentRequest req;
        req.condition = i == 0 ? Condition::many_likes : Condition::few_likes;
        req.participant_login = fmt::format("agent{}", i);
        req.participant_password = "pw";
        req.start_instant = kStart;
        exps[i] = *platform.create_experiment(req).experiment;
    }

    struct Created {
        std::set<std::string> posts, sessions, reactions, views, clicks, answers;
    };
    std::array<Created, 2> created;
    std::array<std::string, 2> tokens;
    auto in_parallel = [&](const std::function<void(int)>& work) {
        std::vector<std::thread> threads;
        for (int i = 0; i < 2; ++i) threads.emplace_back(work, i);
        for (auto& t : threads) t.join();
    };
    for (int day = 1; day <= 6; ++day) {
        clock.set(exps[0].day_begin(day) + 20h);
        platform.tick_all();
        in_parallel([&](int i) {
            auto& c = created[i];
            const auto& exp = exps[i];
            const auto login = platform.login(fmt::format("agent{}", i), "pw");
            tokens[i] = login.token;
            c.sessions.insert(login.context.session_id.str());
            const auto account = exp.participant_id.str();
            if (day == 1) {
                std::map<std::string, int> answers;
                for (int k = 1; k <= 10; ++k) answers[fmt::format("ucla_loneliness_{:02d}", k)] = 1 + k % 5;
                platform.submit_survey(login.token, SurveyPhase::pre, answers);
                for (const auto& [key, v] : answers) c.answers.insert(fmt::format("{}|PRE|{}", account, key));
                const auto ads = platform.ads(login.token);
                const auto click = platform.record_ad_click(login.token, ads.at(i).ad_id);
                c.clicks.insert(fmt::format("{}|{}", click.session_id.str(), click.ad_id.str()));
            }
            if (day <= 5)
                c.posts.insert(platform.create_post(login.token, sim::make_post_body(640, day)).post.post_id.str());
            const auto feed = platform.feed(login.token);
            int liked = 0, viewed = 0;
            for (const auto& item : feed.items) {
                const auto post = item.post.post_id.str();
                if (viewed < 3) {
                    const std::int64_t ms = 1000 * day + 10 * viewed + i;
                    const auto v = platform.record_view(login.token, item.post.post_id, ms);
                    c.views.insert(fmt::format("{}|{}|{}", v.session_id.str(), post, ms));
                    ++viewed;
                }
                if (day <= 5 && liked < 2 && item.post.author_id != exp.participant_id && !item.liked_by_viewer) {
                    platform.react(login.token, item.post.post_id, ReactionKind::like);
                    c.reactions.insert(fmt::format("{}|{}|LIKE", account, post));
                    ++liked;
                }
            }
            if (day == 6) {
                platform.submit_survey(login.token, SurveyPhase::post, {{"stress", i}, {"enjoyment", -i}});
                c.answers.insert(fmt::format("{}|POST|stress", account));
                c.answers.insert(fmt::format("{}|POST|enjoyment", account));
            }
        });
        clock.advance(16min);
        in_parallel([&](int i) { platform.end_session(tokens[i]); });
    }
    clock.set(kStart + 10 * kDay);
    platform.tick_all();

    std::array<ExportBundle, 2> bundles{platform.export_experiment(exps[0].experiment_id),
                                        platform.export_experiment(exps[1].experiment_id)};
    auto keys = [](const Rows& table, std::initializer_list<std::size_t> columns) {
        std::multiset<std::string> out;
        for (const auto& r : table) {
            std::vector<std::string> parts;
            for (auto c : columns) parts.push_back(r.at(c));
            out.insert(fmt::format("{}", fmt::join(parts, "|")));
        }
        return out;
    };
    for (int i = 0; i < 2; ++i) {
        const auto& own = bundles[i];
        const auto& other = bundles[1 - i];
        const auto& c = created[i];
        std::set<std::string> members{exps[i].participant_id.str()};
        for (const auto& b : exps[i].bot_ids) members.insert(b.str());
        const auto ads = [&] {
            std::set<std::string> ids;
            const auto token = platform.login(fmt::format("agent{}", i), "pw").token;
            for (const auto& ad : platform.ads(token)) ids.insert(ad.ad_id.str());
            return ids;
        }();

        const auto posts = rows(own, export_schema::kPosts);
        const auto sessions = rows(own, export_schema::kSessions);
        std::set<std::string> post_ids, session_ids;
        for (const auto& r : posts) post_ids.insert(r[0]);
        for (const auto& r : sessions) session_ids.insert(r[0]);

        // Every row references only this experiment's accounts, posts and sessions.
        auto only = [&](const std::set<std::string>& allowed, const std::string& v, const char* what) {
            o.check(allowed.contains(v), fmt::format("exp {} {}: foreign {}", i, what, v));
        };
        for (const auto& r : posts) only(members, r[1], "posts.author_id");
        for (const auto& r : rows(own, export_schema::kReactions)) {
            only(members, r[1], "reactions.actor_id");
            only(post_ids, r[2], "reactions.post_id");
        }
        for (const auto& r : rows(own, export_schema::kProfiles)) only(members, r[0], "profiles.account_id");
        for (const auto& r : sessions) only(members, r[1], "sessions.account_id");
        for (const auto& r : rows(own, export_schema::kViews)) {
            only(session_ids, r[0], "views.session_id");
            only(post_ids, r[1], "views.post_id");
        }
        for (const auto& r : rows(own, export_schema::kAdClicks)) {
            only(session_ids, r[0], "ad_clicks.session_id");
            only(ads, r[1], "ad_clicks.ad_id");
        }
        for (const auto& r : rows(own, export_schema::kFriendEdges)) {
            only(members, r[0], "friend_edges.a");
            only(members, r[1], "friend_edges.b");
        }
        for (const auto& r : rows(own, export_schema::kSurveyResponses)) only(members, r[0], "survey.account_id");
        const auto exp_rows = rows(own, export_schema::kExperiment);
        o.check(exp_rows.size() == 1 && exp_rows[0][0] == exps[i].experiment_id.str(), "experiment table");

        // Every API-created entity exactly once here and never in the other export.
        auto exactly_once = [&](const std::set<std::string>& made, const std::multiset<std::string>& mine,
                                const std::multiset<std::string>& theirs, const char* what) {
            o.check(!made.empty(), fmt::format("exp {}: no {} created", i, what));
            for (const auto& k : made) {
                o.check(mine.count(k) == 1, fmt::format("exp {} {} {} appears {}x", i, what, k, mine.count(k)));
                o.check(!theirs.contains(k), fmt::format("exp {} {} {} leaked", i, what, k));
            }
        };
        exactly_once(c.posts, keys(posts, {0}), keys(rows(other, export_schema::kPosts), {0}), "post");
        exactly_once(c.sessions, keys(sessions, {0}), keys(rows(other, export_schema::kSessions), {0}), "session");
        exactly_once(c.reactions, keys(rows(own, export_schema::kReactions), {1, 2, 3}),
                     keys(rows(other, export_schema::kReactions), {1, 2, 3}), "reaction");
        exactly_once(c.views, keys(rows(own, export_schema::kViews), {0, 1, 2}),
                     keys(rows(other, export_schema::kViews), {0, 1, 2}), "view");
        exactly_once(c.clicks, keys(rows(own, export_schema::kAdClicks), {0, 1}),
                     keys(rows(other, export_schema::kAdClicks), {0, 1}), "ad click");
        exactly_once(c.answers, keys(rows(own, export_schema::kSurveyResponses), {0, 1, 2}),
                     keys(rows(other, export_schema::kSurveyResponses), {0, 1, 2}), "survey answer");
    }
    return o;
}

// 9
Outcome compliance() {
    Outcome o;
    SimRun run;
    struct Agent {
        std::string name;
        sim::AgentScript script;
        bool expected;
    };
    std::vector<Agent> agents;
    agents.push_back({"compliant", {}, true});
    {
        sim::AgentScript s;
        s.post_chars = 600;
        s.active_per_day = 15min;
        s.active_wrapup = 10min;
        agents.push_back({"at-thresholds", s, true});
    }
    {
        sim::AgentScript s;
        s.post_chars = 599;
        agents.push_back({"short-post", s, false});
    }
    {
        sim::AgentScript s;
        s.skip_post_days = {3};
        agents.push_back({"missing-post", s, false});
    }
    {
        sim::AgentScript s;
        s.likes_per_day = 1;
        agents.push_back({"one-like", s, false});
    }
    {
        sim::AgentScript s;
        s.active_per_day = 15min - 1s;
        agents.push_back({"short-day", s, false});
    }
    {
        sim::AgentScript s;
        s.active_wrapup = 10min - 1s;
        agents.push_back({"short-wrapup", s, false});
    }
    std::vector<sim::Participant> enrolled;
    for (const auto& a : agents) enrolled.push_back(run.simulation.enrol(Condition::many_likes, a.name, a.script, kStart));
    run.simulation.run();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto report = run.platform.compliance(enrolled[i].experiment_id);
        o.check(report.overall == agents[i].expected,
                fmt::format("{} classified {}", agents[i].name, report.overall ? "compliant" : "non-compliant"));
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        std::string name;
        std::chrono::milliseconds limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "many-likes treatment: 24 likes, 4 or 5 per post", 10s, [] { return treatment(Condition::many_likes); }},
        {2, "few-likes treatment: one like on the first post", 10s, [] { return treatment(Condition::few_likes); }},
        {3, "bot like sums {2|3, 2|3, 12, 12, 24, 24}", 10s, bot_ecology},
        {4, "reference U_min and r pairs agree at n = 85", 1s, table_consistency},
        {5, "Mann-Whitney exact vs enumeration, approximation vs exact", 60s, mann_whitney_oracle},
        {6, "Wilcoxon exact vs sign enumeration", 60s, wilcoxon_oracle},
        {7, "scale scoring ranges and reverse-coding involution", 1s, scale_scoring},
        {8, "isolation and export completeness", 30s, isolation_and_export},
        {9, "compliance classification", 10s, compliance},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto started = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.check(false, fmt::format("exception: {}", e.what()));
        }
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        outcome.check(elapsed <= c.limit, fmt::format("took {} ms, limit {} ms", elapsed.count(), c.limit.count()));
        fmt::print("{} criterion {}: {} ({} ms)\n", outcome.ok ? "PASS" : "FAIL", c.number, c.name, elapsed.count());
        for (const auto& p : outcome.problems) fmt::print("    {}\n", p);
        failures += !outcome.ok;
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
