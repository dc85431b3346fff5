#include "fakebook/measures/instrument.hpp"

#include "fakebook/core/error.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace fakebook {

std::string_view to_string(SurveyPhase phase) noexcept { return phase == SurveyPhase::pre ? "PRE" : "POST"; }

SurveyPhase parse_survey_phase(std::string_view s) {
    if (s == "PRE") return SurveyPhase::pre;
    if (s == "POST") return SurveyPhase::post;
    fail(ErrorCode::validation, fmt::format("unknown survey phase '{}'", s));
}

InstrumentDefinition::InstrumentDefinition(std::string instrument_id, std::vector<InstrumentItem> items,
                                           std::set<SurveyPhase> phases)
    : id_(std::move(instrument_id)), items_(std::move(items)), phases_(std::move(phases)) {
    if (id_.empty()) fail(ErrorCode::validation, "instrument_id must not be empty");
    if (items_.empty()) fail(ErrorCode::validation, fmt::format("instrument '{}' has no items", id_));
    std::set<std::string> keys;
    for (const auto& item : items_) {
        if (item.item_key.empty()) fail(ErrorCode::validation, fmt::format("instrument '{}' has an unnamed item", id_));
        if (!keys.insert(item.item_key).second)
            fail(ErrorCode::validation, fmt::format("instrument '{}' repeats item '{}'", id_, item.item_key));
        if (item.response_min > item.response_max)
            fail(ErrorCode::validation, fmt::format("item '{}' has min {} above max {}", item.item_key,
                                                    item.response_min, item.response_max));
        score_min_ += item.response_min;
        score_max_ += item.response_max;
    }
}

const InstrumentItem* InstrumentDefinition::find(std::string_view item_key) const noexcept {
    for (const auto& item : items_)
        if (item.item_key == item_key) return &item;
    return nullptr;
}

InstrumentDefinition InstrumentDefinition::from_json(const nlohmann::json& j) {
    try {
        std::vector<InstrumentItem> items;
        for (const auto& it : j.at("items")) {
            items.push_back({it.at("item_key").get<std::string>(), it.value("prompt", std::string{}),
                             it.at("min").get<int>(), it.at("max").get<int>(), it.value("reverse", false)});
        }
        std::set<SurveyPhase> phases{SurveyPhase::pre, SurveyPhase::post};
        if (j.contains("phases")) {
            phases.clear();
            for (const auto& p : j.at("phases")) phases.insert(parse_survey_phase(p.get<std::string>()));
        }
        return InstrumentDefinition(j.at("instrument_id").get<std::string>(), std::move(items), std::move(phases));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::validation, fmt::format("malformed instrument definition: {}", e.what()));
    }
}

nlohmann::json InstrumentDefinition::to_json() const {
    auto items = nlohmann::json::array();
    for (const auto& it : items_)
        items.push_back({{"item_key", it.item_key},
                         {"prompt", it.prompt},
                         {"min", it.response_min},
                         {"max", it.response_max},
                         {"reverse", it.reverse}});
    auto phases = nlohmann::json::array();
    for (auto p : phases_) phases.push_back(to_string(p));
    return {{"instrument_id", id_}, {"items", items}, {"phases", phases}};
}

std::vector<ResponseViolation> validate_response(const SurveyResponse& response,
                                                 const InstrumentDefinition& definition) {
    std::vector<ResponseViolation> out;
    for (const auto& item : definition.items()) {
        auto it = response.answers.find(item.item_key);
        if (it == response.answers.end()) {
            out.push_back({ResponseViolation::Kind::missing, item.item_key,
                           fmt::format("item '{}' is unanswered", item.item_key)});
        } else if (it->second < item.response_min || it->second > item.response_max) {
            out.push_back({ResponseViolation::Kind::out_of_range, item.item_key,
                           fmt::format("item '{}' answer {} outside [{}, {}]", item.item_key, it->second,
                                       item.response_min, item.response_max)});
        }
    }
    return out;
}

int recode(int answer, const InstrumentItem& item) noexcept {
    return item.reverse ? item.response_min + item.response_max - answer : answer;
}

int score_scale(const SurveyResponse& response, const InstrumentDefinition& definition) {
    const auto violations = validate_response(response, definition);
    if (!violations.empty()) {
        std::vector<std::string> missing, other;
        for (const auto& v : violations) {
            if (v.kind == ResponseViolation::Kind::missing)
                missing.push_back(v.item_key);
            else
                other.push_back(v.message);
        }
        std::string msg = fmt::format("cannot score '{}':", definition.instrument_id());
        if (!missing.empty()) msg += fmt::format(" missing items [{}]", fmt::join(missing, ", "));
        if (!other.empty()) msg += fmt::format(" {}", fmt::join(other, "; "));
        fail(ErrorCode::validation, msg);
    }
    int score = 0;
    for (const auto& item : definition.items()) score += recode(response.answers.at(item.item_key), item);
    return score;
}

// ---------------------------------------------------------------------------

InstrumentSet::InstrumentSet(std::vector<InstrumentDefinition> instruments) : instruments_(std::move(instruments)) {
    std::set<std::string> ids, keys;
    for (const auto& def : instruments_) {
        if (!ids.insert(def.instrument_id()).second)
            fail(ErrorCode::validation, fmt::format("duplicate instrument '{}'", def.instrument_id()));
        for (const auto& item : def.items())
            if (!keys.insert(item.item_key).second)
                fail(ErrorCode::validation, fmt::format("item key '{}' used by two instruments", item.item_key));
    }
}

const InstrumentDefinition* InstrumentSet::find(std::string_view instrument_id) const noexcept {
    for (const auto& def : instruments_)
        if (def.instrument_id() == instrument_id) return &def;
    return nullptr;
}

const InstrumentDefinition* InstrumentSet::owner_of(std::string_view item_key) const noexcept {
    for (const auto& def : instruments_)
        if (def.find(item_key)) return &def;
    return nullptr;
}

InstrumentSet InstrumentSet::from_json(const nlohmann::json& j) {
    std::vector<InstrumentDefinition> defs;
    if (j.is_object() && j.contains("instruments")) {
        for (const auto& d : j.at("instruments")) defs.push_back(InstrumentDefinition::from_json(d));
    } else {
        defs.push_back(InstrumentDefinition::from_json(j));
    }
    return InstrumentSet(std::move(defs));
}

InstrumentSet InstrumentSet::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::not_found, fmt::format("cannot open instrument file '{}'", file.string()));
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::validation, fmt::format("'{}' is not valid JSON: {}", file.string(), e.what()));
    }
}

nlohmann::json InstrumentSet::to_json() const {
    auto list = nlohmann::json::array();
    for (const auto& def : instruments_) list.push_back(def.to_json());
    return {{"instruments", list}};
}

namespace instruments {

namespace {

InstrumentDefinition ten_item_scale(std::string_view id, std::string_view label, int min, int max,
                                    const std::set<int>& reverse_items) {
    std::vector<InstrumentItem> items;
    for (int i = 1; i <= 10; ++i)
        items.push_back({fmt::format("{}_{:02d}", id, i), fmt::format("{} item {}", label, i), min, max,
                         reverse_items.contains(i)});
    return InstrumentDefinition(std::string(id), std::move(items));
}

}  // namespace

InstrumentDefinition ucla_loneliness(std::set<int> reverse_items) {
    return ten_item_scale(kLoneliness, "Loneliness", 1, 5, reverse_items);
}

InstrumentDefinition rosenberg_self_esteem(std::set<int> reverse_items) {
    return ten_item_scale(kSelfEsteem, "Self-esteem", 1, 4, reverse_items);
}

InstrumentDefinition single_item(std::string_view key) {
    return InstrumentDefinition(
        std::string(key),
        {InstrumentItem{std::string(key), fmt::format("Single item: {}", key), SingleItemMeasure::kMin,
                        SingleItemMeasure::kMax, false}},
        {SurveyPhase::post});
}

InstrumentSet default_set() {
    std::vector<InstrumentDefinition> defs{ucla_loneliness(), rosenberg_self_esteem()};
    for (auto key : kSingleItems) defs.push_back(single_item(key));
    return InstrumentSet(std::move(defs));
}

}  // namespace instruments

}  // namespace fakebook
