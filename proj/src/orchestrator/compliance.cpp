#include "fakebook/orchestrator/compliance.hpp"

#include "fakebook/core/text.hpp"

#include <algorithm>

namespace fakebook {

namespace {

std::vector<ActivitySpan> merge(std::span<const ActivitySpan> activity) {
    std::vector<ActivitySpan> spans;
    for (const auto& s : activity)
        if (s.end > s.begin) spans.push_back(s);
    std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
    std::vector<ActivitySpan> merged;
    for (const auto& s : spans) {
        if (!merged.empty() && s.begin <= merged.back().end)
            merged.back().end = std::max(merged.back().end, s.end);
        else
            merged.push_back(s);
    }
    return merged;
}

std::int64_t active_seconds(const std::vector<ActivitySpan>& merged, Instant begin, Instant end) {
    Duration total{0};
    for (const auto& s : merged) {
        const auto lo = std::max(s.begin, begin);
        const auto hi = std::min(s.end, end);
        if (hi > lo) total += hi - lo;
    }
    return std::chrono::duration_cast<std::chrono::seconds>(total).count();
}

}  // namespace

ComplianceReport compliance_report(const Experiment& experiment, std::span<const Post> participant_posts,
                                   std::span<const Reaction> participant_reactions,
                                   std::span<const ActivitySpan> activity, const ComplianceRules& rules) {
    const auto merged = merge(activity);
    ComplianceReport report;
    report.overall = true;

    for (int d = 1; d <= experiment.day_count; ++d) {
        const auto begin = experiment.day_begin(d);
        const auto end = experiment.day_begin(d + 1);
        auto within = [&](Instant t) { return t >= begin && t < end; };

        DayCompliance day;
        day.day = d;
        for (const auto& p : participant_posts) {
            if (p.author_id != experiment.participant_id || !within(p.created_at)) continue;
            day.posted = true;
            day.post_chars = std::max(day.post_chars, utf8_length(p.body));
        }
        for (const auto& r : participant_reactions)
            if (r.actor_id == experiment.participant_id && r.kind == ReactionKind::like && within(r.created_at))
                ++day.likes_given;
        day.active_seconds = active_seconds(merged, begin, end);
        day.compliant = day.posted && day.post_chars >= rules.min_post_chars &&
                        day.likes_given >= rules.min_likes_given &&
                        day.active_seconds >= rules.min_active_per_day.count();
        report.overall = report.overall && day.compliant;
        report.days.push_back(day);
    }

    report.wrapup_active_seconds = active_seconds(merged, experiment.day_begin(experiment.wrapup_day),
                                                  experiment.day_begin(experiment.wrapup_day + 1));
    report.wrapup_compliant = report.wrapup_active_seconds >= rules.min_active_wrapup.count();
    report.overall = report.overall && report.wrapup_compliant;
    return report;
}

}  // namespace fakebook
