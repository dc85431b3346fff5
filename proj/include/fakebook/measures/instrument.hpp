#pragma once

#include "fakebook/core/ids.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fakebook {

enum class SurveyPhase { pre, post };

std::string_view to_string(SurveyPhase phase) noexcept;
SurveyPhase parse_survey_phase(std::string_view s);

struct InstrumentItem {
    std::string item_key;
    std::string prompt;
    int response_min = 1;
    int response_max = 5;
    bool reverse = false;

    friend bool operator==(const InstrumentItem&, const InstrumentItem&) = default;
};

/// A questionnaire scale scored as the sum of its items, with reverse-keyed
/// items recoded as `min + max - answer`.
class InstrumentDefinition {
public:
    /// Throws validation on an empty item list, duplicate item keys or an
    /// item whose response_min exceeds response_max.
    InstrumentDefinition(std::string instrument_id, std::vector<InstrumentItem> items,
                         std::set<SurveyPhase> phases = {SurveyPhase::pre, SurveyPhase::post});

    const std::string& instrument_id() const noexcept { return id_; }
    const std::vector<InstrumentItem>& items() const noexcept { return items_; }
    const std::set<SurveyPhase>& phases() const noexcept { return phases_; }
    int score_min() const noexcept { return score_min_; }
    int score_max() const noexcept { return score_max_; }
    const InstrumentItem* find(std::string_view item_key) const noexcept;

    /// `{instrument_id, items: [{item_key, prompt, min, max, reverse}], phases?}`
    static InstrumentDefinition from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    friend bool operator==(const InstrumentDefinition&, const InstrumentDefinition&) = default;

private:
    std::string id_;
    std::vector<InstrumentItem> items_;
    std::set<SurveyPhase> phases_;
    int score_min_ = 0;
    int score_max_ = 0;
};

struct SurveyResponse {
    AccountId account_id;
    SurveyPhase phase = SurveyPhase::pre;
    std::map<std::string, int> answers;
};

/// Single-item measures answer on [-2, 2].
struct SingleItemMeasure {
    std::string item_key;
    int value = 0;

    static constexpr int kMin = -2;
    static constexpr int kMax = 2;
    bool valid() const noexcept { return value >= kMin && value <= kMax; }
};

struct ResponseViolation {
    enum class Kind { missing, out_of_range };
    Kind kind = Kind::missing;
    std::string item_key;
    std::string message;
};

/// Every problem with the response's answers to the instrument's items.
/// Answers to keys outside the instrument are ignored.
std::vector<ResponseViolation> validate_response(const SurveyResponse& response,
                                                 const InstrumentDefinition& definition);

/// Applies reverse keying; identity for forward items.
int recode(int answer, const InstrumentItem& item) noexcept;

/// Sum score. Throws validation listing every missing or out-of-range item.
int score_scale(const SurveyResponse& response, const InstrumentDefinition& definition);

/// The instruments a deployment administers.
class InstrumentSet {
public:
    InstrumentSet() = default;
    /// Throws validation when two instruments share an id or an item key.
    explicit InstrumentSet(std::vector<InstrumentDefinition> instruments);

    const std::vector<InstrumentDefinition>& instruments() const noexcept { return instruments_; }
    const InstrumentDefinition* find(std::string_view instrument_id) const noexcept;
    const InstrumentDefinition* owner_of(std::string_view item_key) const noexcept;

    /// Accepts a single definition object or `{"instruments": [...]}`.
    static InstrumentSet from_json(const nlohmann::json& j);
    static InstrumentSet load(const std::filesystem::path& file);
    nlohmann::json to_json() const;

private:
    std::vector<InstrumentDefinition> instruments_;
};

namespace instruments {

inline constexpr std::string_view kLoneliness = "ucla_loneliness";
inline constexpr std::string_view kSelfEsteem = "rosenberg_self_esteem";

/// Single-item post-survey measures, in reporting order.
inline constexpr std::array<std::string_view, 8> kSingleItems = {
    "stress", "sadness", "anxiety", "enjoyment", "belongingness", "appraisal", "rejection", "situational_self_esteem",
};

/// 10 items on 1..5, no reverse-keyed items by default. Score 10..50.
InstrumentDefinition ucla_loneliness(std::set<int> reverse_items = {});
/// 10 items on 1..4, reverse-keyed items 2, 5, 6, 8, 9 by default. Score 10..40.
InstrumentDefinition rosenberg_self_esteem(std::set<int> reverse_items = {2, 5, 6, 8, 9});
InstrumentDefinition single_item(std::string_view key);

/// Both scales plus the eight single items.
InstrumentSet default_set();

}  // namespace instruments

}  // namespace fakebook
