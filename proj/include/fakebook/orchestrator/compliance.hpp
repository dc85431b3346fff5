#pragma once

#include "fakebook/domain/model.hpp"

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

namespace fakebook {

/// Daily task thresholds participants are asked to meet.
struct ComplianceRules {
    std::size_t min_post_chars = 600;
    int min_likes_given = 2;
    std::chrono::seconds min_active_per_day{15 * 60};
    std::chrono::seconds min_active_wrapup{10 * 60};
};

struct DayCompliance {
    int day = 0;
    bool posted = false;
    /// Longest post of the day, in Unicode code points.
    std::size_t post_chars = 0;
    int likes_given = 0;
    std::int64_t active_seconds = 0;
    bool compliant = false;
};

struct ComplianceReport {
    std::vector<DayCompliance> days;
    std::int64_t wrapup_active_seconds = 0;
    bool wrapup_compliant = false;
    bool overall = false;
};

/// A stretch of time the participant was active on the platform.
struct ActivitySpan {
    Instant begin{};
    Instant end{};
};

/// Per-day compliance from the participant's posts, the likes they gave and
/// their activity spans. Overlapping spans are merged before summing; days
/// without data report false.
ComplianceReport compliance_report(const Experiment& experiment, std::span<const Post> participant_posts,
                                   std::span<const Reaction> participant_reactions,
                                   std::span<const ActivitySpan> activity, const ComplianceRules& rules = {});

}  // namespace fakebook
