#pragma once

#include "fakebook/platform/platform.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fakebook::sim {

/// Scripted participant behaviour for one study.
struct AgentScript {
    /// Time of day the agent signs in.
    std::chrono::seconds session_start = std::chrono::hours{23};
    /// Length of each day's post, in characters.
    std::size_t post_chars = 650;
    /// Study days (1-based) on which the agent does not post.
    std::vector<int> skip_post_days;
    int likes_per_day = 2;
    Duration active_per_day = std::chrono::minutes{16};
    Duration active_wrapup = std::chrono::minutes{11};
    /// Milliseconds reported per feed item viewed.
    std::int64_t view_ms = 4000;
    bool click_ad_on_first_day = true;
};

using SurveyAnswers = std::map<std::string, int>;
/// Produces survey answers for a participant and phase; empty maps are skipped.
using SurveyAuthor = std::function<SurveyAnswers(const ExperimentId&, Condition, SurveyPhase)>;

struct Participant {
    ExperimentId experiment_id;
    Condition condition = Condition::many_likes;
    std::string login;
    std::string password;
    AgentScript script;
};

/// Drives any number of scripted participants through their studies on a
/// shared virtual clock, in lockstep by study day.
class StudySimulation {
public:
    StudySimulation(Platform& platform, VirtualClock& clock) : platform_(platform), clock_(clock) {}

    /// Creates an experiment starting at the clock's next midnight (or
    /// `start`) and enrols a scripted participant in it.
    Participant enrol(Condition condition, std::string login, AgentScript script = {},
                      std::optional<Instant> start = std::nullopt);

    void set_survey_author(SurveyAuthor author) { survey_author_ = std::move(author); }

    /// Runs every study day plus the wrap-up day, then advances one more day
    /// so all pending bot activity has executed.
    void run();

    const std::vector<Participant>& participants() const noexcept { return participants_; }

private:
    /// Signs in and performs the day's tasks; returns the session token.
    std::string act(const Participant& p, int day, const Experiment& exp);

    Platform& platform_;
    VirtualClock& clock_;
    std::vector<Participant> participants_;
    SurveyAuthor survey_author_;
};

/// A post body of exactly `chars` code points.
std::string make_post_body(std::size_t chars, int day);

}  // namespace fakebook::sim
