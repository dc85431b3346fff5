#pragma once

#include "fakebook/core/ids.hpp"
#include "fakebook/domain/model.hpp"
#include "fakebook/measures/instrument.hpp"
#include "fakebook/stats/descriptives.hpp"
#include "fakebook/stats/nonparametric.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fakebook::stats {

struct ParticipantRecord {
    ExperimentId experiment_id;
    AccountId account_id;
    Condition condition = Condition::many_likes;
};

struct ResponseRow {
    AccountId account_id;
    SurveyPhase phase = SurveyPhase::pre;
    std::string item_key;
    int value = 0;
};

/// Group labels and survey answers pooled over one or more experiment exports.
struct StudyData {
    std::vector<ParticipantRecord> participants;
    std::vector<ResponseRow> responses;

    void merge(StudyData other);
};

/// From the bytes of experiment.csv and survey_responses.csv.
StudyData parse_study_tables(std::string_view experiment_csv, std::string_view survey_csv);

/// `dir` is either one export (it holds experiment.csv) or a directory whose
/// immediate subdirectories are exports; the latter are merged. Throws
/// not_found when no export is present and schema on malformed tables.
StudyData load_study(const std::filesystem::path& dir);

struct BetweenGroupRow {
    std::string measure;
    std::optional<Descriptives> many;
    std::optional<Descriptives> few;
    /// Group A = MANY_LIKES.
    std::optional<UTestResult> test;
    std::optional<std::string> gap;
};

struct WithinGroupRow {
    std::string instrument;
    Condition condition = Condition::many_likes;
    std::size_t n_pairs = 0;
    std::optional<Descriptives> pre;
    std::optional<Descriptives> post;
    std::optional<WTestResult> test;
    std::optional<std::string> gap;
};

struct ResultsReport {
    std::size_t n_many = 0;
    std::size_t n_few = 0;
    std::vector<BetweenGroupRow> between;
    std::vector<WithinGroupRow> within;
    /// Every missing or unusable piece of data, in discovery order.
    std::vector<std::string> gaps;
};

/// Single items compared between groups on POST answers; the two scales
/// compared pre against post within each condition.
ResultsReport build_results_report(const StudyData& data,
                                   const InstrumentSet& instruments = instruments::default_set(),
                                   const TestOptions& options = {});

std::string render_text(const ResultsReport& report);
std::string render_csv(const ResultsReport& report);
nlohmann::json to_json(const ResultsReport& report);

}  // namespace fakebook::stats
