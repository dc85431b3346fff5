#include "fakebook/core/error.hpp"
#include "fakebook/measures/instrument.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <random>

using namespace fakebook;

namespace {

SurveyResponse all_answers(const InstrumentDefinition& def, int value) {
    SurveyResponse r{AccountId("acc-1"), SurveyPhase::pre, {}};
    for (const auto& item : def.items()) r.answers[item.item_key] = value;
    return r;
}

// Minimum and maximum sum over every item by direct enumeration of answers.
std::pair<int, int> enumerate_extremes(const InstrumentDefinition& def) {
    int lo = 0, hi = 0;
    for (const auto& item : def.items()) {
        int item_lo = 1 << 20, item_hi = -(1 << 20);
        for (int a = item.response_min; a <= item.response_max; ++a) {
            item_lo = std::min(item_lo, recode(a, item));
            item_hi = std::max(item_hi, recode(a, item));
        }
        lo += item_lo;
        hi += item_hi;
    }
    return {lo, hi};
}

}  // namespace

TEST(Scales, UclaRange) {
    const auto ucla = instruments::ucla_loneliness();
    EXPECT_EQ(ucla.items().size(), 10u);
    EXPECT_EQ(score_scale(all_answers(ucla, 1), ucla), 10);
    EXPECT_EQ(score_scale(all_answers(ucla, 5), ucla), 50);
    EXPECT_EQ(ucla.score_min(), 10);
    EXPECT_EQ(ucla.score_max(), 50);
    EXPECT_EQ(enumerate_extremes(ucla), std::make_pair(10, 50));
}

TEST(Scales, RosenbergRange) {
    const auto rses = instruments::rosenberg_self_esteem();
    EXPECT_EQ(rses.score_min(), 10);
    EXPECT_EQ(rses.score_max(), 40);
    EXPECT_EQ(enumerate_extremes(rses), std::make_pair(10, 40));
    // Extremes are reached by answering forward items low and reverse items high.
    SurveyResponse low{AccountId("a"), SurveyPhase::pre, {}};
    SurveyResponse high = low;
    for (const auto& item : rses.items()) {
        low.answers[item.item_key] = item.reverse ? 4 : 1;
        high.answers[item.item_key] = item.reverse ? 1 : 4;
    }
    EXPECT_EQ(score_scale(low, rses), 10);
    EXPECT_EQ(score_scale(high, rses), 40);
    // All 2s on a scale with five reverse items: 5*2 + 5*3.
    EXPECT_EQ(score_scale(all_answers(rses, 2), rses), 25);
}

TEST(Scales, RecodeIsAnInvolution) {
    for (int lo = -3; lo <= 2; ++lo)
        for (int hi = lo; hi <= lo + 6; ++hi)
            for (bool reverse : {false, true}) {
                const InstrumentItem item{"k", "", lo, hi, reverse};
                for (int a = lo; a <= hi; ++a) {
                    const int r = recode(a, item);
                    EXPECT_GE(r, lo);
                    EXPECT_LE(r, hi);
                    EXPECT_EQ(recode(r, item), a);
                    if (!reverse) EXPECT_EQ(r, a);
                }
            }
}

TEST(Scales, ScoreIsMonotoneInForwardItems) {
    const auto rses = instruments::rosenberg_self_esteem();
    std::mt19937 rng(2);
    for (int iter = 0; iter < 2000; ++iter) {
        SurveyResponse r{AccountId("a"), SurveyPhase::post, {}};
        for (const auto& item : rses.items()) r.answers[item.item_key] = 1 + static_cast<int>(rng() % 4);
        const int base = score_scale(r, rses);
        const auto& item = rses.items()[rng() % rses.items().size()];
        auto& a = r.answers[item.item_key];
        if (a == 4) continue;
        ++a;
        EXPECT_EQ(score_scale(r, rses), base + (item.reverse ? -1 : 1));
    }
}

TEST(Scales, RandomResponsesStayInBounds) {
    const auto set = instruments::default_set();
    std::mt19937 rng(9);
    for (int iter = 0; iter < 10000; ++iter) {
        const auto& def = set.instruments()[rng() % set.instruments().size()];
        SurveyResponse r{AccountId("a"), SurveyPhase::post, {}};
        for (const auto& item : def.items())
            r.answers[item.item_key] =
                item.response_min + static_cast<int>(rng() % (item.response_max - item.response_min + 1));
        const int s = score_scale(r, def);
        ASSERT_GE(s, def.score_min());
        ASSERT_LE(s, def.score_max());
    }
}

TEST(Scales, ViolationsListEveryProblem) {
    const auto ucla = instruments::ucla_loneliness();
    auto r = all_answers(ucla, 3);
    r.answers.erase("ucla_loneliness_02");
    r.answers["ucla_loneliness_07"] = 6;
    r.answers["unrelated"] = 99;
    const auto v = validate_response(r, ucla);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].kind, ResponseViolation::Kind::missing);
    EXPECT_EQ(v[1].kind, ResponseViolation::Kind::out_of_range);
    try {
        score_scale(r, ucla);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::validation);
        EXPECT_NE(std::string(e.what()).find("ucla_loneliness_02"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("ucla_loneliness_07"), std::string::npos);
    }
}

TEST(Scales, DefinitionChecks) {
    EXPECT_THROW(InstrumentDefinition("x", {}), Error);
    EXPECT_THROW(InstrumentDefinition("x", {{"a", "", 1, 5, false}, {"a", "", 1, 5, false}}), Error);
    EXPECT_THROW(InstrumentDefinition("x", {{"a", "", 5, 1, false}}), Error);
    EXPECT_THROW(InstrumentSet({instruments::ucla_loneliness(), instruments::ucla_loneliness()}), Error);
}

TEST(Scales, SingleItems) {
    const auto item = instruments::single_item("stress");
    EXPECT_EQ(item.score_min(), -2);
    EXPECT_EQ(item.score_max(), 2);
    EXPECT_EQ(item.phases(), (std::set<SurveyPhase>{SurveyPhase::post}));
    EXPECT_TRUE((SingleItemMeasure{"stress", 2}).valid());
    EXPECT_FALSE((SingleItemMeasure{"stress", 3}).valid());
}

TEST(Scales, JsonRoundTripAndShippedFile) {
    const auto set = instruments::default_set();
    EXPECT_EQ(set.instruments().size(), 10u);
    const auto back = InstrumentSet::from_json(set.to_json());
    EXPECT_EQ(back.instruments(), set.instruments());
    const auto shipped = InstrumentSet::load(FAKEBOOK_DEFAULT_INSTRUMENTS);
    EXPECT_EQ(shipped.instruments(), set.instruments());
    EXPECT_EQ(set.owner_of("rosenberg_self_esteem_03")->instrument_id(), "rosenberg_self_esteem");
    EXPECT_EQ(InstrumentSet::from_json(set.to_json()["instruments"][0]).instruments().size(), 1u);
    EXPECT_THROW(InstrumentSet::from_json(nlohmann::json::parse(R"({"instrument_id":"x"})")), Error);
}
