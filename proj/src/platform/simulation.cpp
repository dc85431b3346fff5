#include "fakebook/platform/simulation.hpp"

#include "fakebook/core/error.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace fakebook::sim {

std::string make_post_body(std::size_t chars, int day) {
    static constexpr std::string_view kFiller =
        "Today I went for a long walk by the river and thought about the week so far. "
        "Work was busy, dinner with friends was lovely and the weather finally turned. ";
    std::string body = fmt::format("Day {} diary. ", day);
    while (body.size() < chars) body += kFiller;
    body.resize(chars);
    if (!body.empty() && body.back() == ' ') body.back() = '.';
    return body;
}

Participant StudySimulation::enrol(Condition condition, std::string login, AgentScript script,
                                   std::optional<Instant> start) {
    if (!start) {
        const auto now = clock_.now();
        start = std::chrono::floor<std::chrono::days>(now) + kDay;
    }
    ExperimentRequest request;
    request.condition = condition;
    request.participant_login = login;
    request.participant_password = login + "-secret";
    request.start_instant = *start;
    const auto created = platform_.create_experiment(request);
    if (!created.experiment)
        fail(ErrorCode::validation, fmt::format("default fixture rejected: {}", fmt::join(created.report.errors, "; ")));
    Participant p{created.experiment->experiment_id, condition, std::move(login), request.participant_password,
                  std::move(script)};
    participants_.push_back(p);
    return p;
}

std::string StudySimulation::act(const Participant& p, int day, const Experiment& exp) {
    const auto token = platform_.login(p.login, p.password).token;
    const bool wrapup = day == exp.wrapup_day;

    auto survey = [&](SurveyPhase phase) {
        if (!survey_author_) return;
        const auto answers = survey_author_(p.experiment_id, p.condition, phase);
        if (!answers.empty()) platform_.submit_survey(token, phase, answers);
    };
    if (day == 1) survey(SurveyPhase::pre);

    if (!wrapup) {
        const auto& skip = p.script.skip_post_days;
        if (std::find(skip.begin(), skip.end(), day) == skip.end())
            platform_.create_post(token, make_post_body(p.script.post_chars, day));
    }

    const auto feed = platform_.feed(token);
    int views = 0;
    for (const auto& item : feed.items) {
        if (views++ >= 6) break;
        platform_.record_view(token, item.post.post_id, p.script.view_ms);
    }
    if (!wrapup) {
        int liked = 0;
        for (const auto& item : feed.items) {
            if (liked >= p.script.likes_per_day) break;
            if (item.post.author_id == exp.participant_id || item.liked_by_viewer) continue;
            platform_.react(token, item.post.post_id, ReactionKind::like);
            ++liked;
        }
    }
    if (day == 1 && p.script.click_ad_on_first_day) {
        const auto ads = platform_.ads(token);
        if (!ads.empty()) platform_.record_ad_click(token, ads.front().ad_id);
    }
    if (wrapup) survey(SurveyPhase::post);
    return token;
}

void StudySimulation::run() {
    struct Step {
        Instant at;
        bool begin = true;
        std::size_t participant = 0;
        int day = 0;
    };
    std::vector<Experiment> exps;
    std::vector<Step> steps;
    Instant last_end{};
    for (std::size_t i = 0; i < participants_.size(); ++i) {
        const auto& p = participants_[i];
        const auto exp = platform_.experiment(p.experiment_id).experiment;
        exps.push_back(exp);
        for (int day = 1; day <= exp.wrapup_day; ++day) {
            const auto begin = exp.day_begin(day) + p.script.session_start;
            const auto active = day == exp.wrapup_day ? p.script.active_wrapup : p.script.active_per_day;
            steps.push_back({begin, true, i, day});
            steps.push_back({begin + active, false, i, day});
        }
        last_end = std::max(last_end, exp.day_begin(exp.wrapup_day + 1));
    }
    std::stable_sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.at < b.at; });

    std::map<std::size_t, std::string> tokens;
    for (const auto& step : steps) {
        if (step.at > clock_.now()) clock_.set(step.at);
        platform_.tick_all();
        const auto& p = participants_[step.participant];
        if (step.begin) {
            tokens[step.participant] = act(p, step.day, exps[step.participant]);
            continue;
        }
        const auto& token = tokens.at(step.participant);
        platform_.feed(token);
        platform_.end_session(token);
    }
    if (last_end + kDay > clock_.now()) clock_.set(last_end + kDay);
    platform_.tick_all();
}

}  // namespace fakebook::sim
