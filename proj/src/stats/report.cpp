#include "fakebook/stats/report.hpp"

#include "fakebook/core/csv.hpp"
#include "fakebook/core/error.hpp"
#include "fakebook/core/text.hpp"
#include "fakebook/domain/export_schema.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace fakebook::stats {

namespace {

std::vector<csv::Record> read_table(std::string_view bytes, const export_schema::Table& table) {
    std::vector<csv::Record> records;
    try {
        records = csv::read(bytes);
    } catch (const csv::SyntaxError& e) {
        fail(ErrorCode::schema, fmt::format("{}: row {}: {}", table.file_name(), e.row(), e.what()));
    }
    if (records.empty() || records.front().fields != table.header)
        fail(ErrorCode::schema,
             fmt::format("{}: expected header '{}'", table.file_name(), fmt::join(table.header, ",")));
    for (const auto& r : records)
        if (r.fields.size() != table.header.size())
            fail(ErrorCode::schema, fmt::format("{}: row {} has {} fields, expected {}", table.file_name(), r.row,
                                                r.fields.size(), table.header.size()));
    records.erase(records.begin());
    return records;
}

template <class F>
auto at_row(const export_schema::Table& table, std::size_t row, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        fail(ErrorCode::schema, fmt::format("{}: row {}: {}", table.file_name(), row, e.what()));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::not_found, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

StudyData load_single(const std::filesystem::path& dir) {
    const auto survey = dir / export_schema::kSurveyResponses.file_name();
    const auto survey_bytes = std::filesystem::exists(survey)
                                  ? read_file(survey)
                                  : csv::write(export_schema::kSurveyResponses.header, {});
    return parse_study_tables(read_file(dir / export_schema::kExperiment.file_name()), survey_bytes);
}

}  // namespace

void StudyData::merge(StudyData other) {
    std::set<AccountId> known;
    for (const auto& p : participants) known.insert(p.account_id);
    for (const auto& p : other.participants)
        if (known.contains(p.account_id))
            fail(ErrorCode::schema, fmt::format("participant '{}' appears in more than one export", p.account_id.str()));
    participants.insert(participants.end(), other.participants.begin(), other.participants.end());
    responses.insert(responses.end(), std::make_move_iterator(other.responses.begin()),
                     std::make_move_iterator(other.responses.end()));
}

StudyData parse_study_tables(std::string_view experiment_csv, std::string_view survey_csv) {
    using export_schema::kExperiment;
    using export_schema::kSurveyResponses;
    StudyData data;
    for (const auto& r : read_table(experiment_csv, kExperiment)) {
        data.participants.push_back(at_row(kExperiment, r.row, [&] {
            return ParticipantRecord{ExperimentId(r.fields[0]), AccountId(r.fields[1]), parse_condition(r.fields[2])};
        }));
    }
    for (const auto& r : read_table(survey_csv, kSurveyResponses)) {
        data.responses.push_back(at_row(kSurveyResponses, r.row, [&] {
            const auto value = parse_int(r.fields[3]);
            if (!value) fail(ErrorCode::validation, fmt::format("value '{}' is not an integer", r.fields[3]));
            return ResponseRow{AccountId(r.fields[0]), parse_survey_phase(r.fields[1]), r.fields[2],
                               static_cast<int>(*value)};
        }));
    }
    return data;
}

StudyData load_study(const std::filesystem::path& dir) {
    if (std::filesystem::exists(dir / export_schema::kExperiment.file_name())) return load_single(dir);
    if (!std::filesystem::is_directory(dir))
        fail(ErrorCode::not_found, fmt::format("export directory '{}' does not exist", dir.string()));
    std::vector<std::filesystem::path> exports;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_directory() && std::filesystem::exists(entry.path() / export_schema::kExperiment.file_name()))
            exports.push_back(entry.path());
    if (exports.empty())
        fail(ErrorCode::not_found, fmt::format("no export found under '{}'", dir.string()));
    std::sort(exports.begin(), exports.end());
    StudyData data;
    for (const auto& e : exports) data.merge(load_single(e));
    return data;
}

// ---------------------------------------------------------------------------

namespace {

using Answers = std::map<std::string, int>;

struct Indexed {
    std::map<AccountId, Condition> condition;
    std::vector<AccountId> order;  // participants in input order
    std::map<std::pair<AccountId, SurveyPhase>, Answers> answers;
};

Indexed index(const StudyData& data, std::vector<std::string>& gaps) {
    Indexed ix;
    for (const auto& p : data.participants) {
        if (ix.condition.emplace(p.account_id, p.condition).second) ix.order.push_back(p.account_id);
    }
    std::set<AccountId> unknown;
    for (const auto& r : data.responses) {
        if (!ix.condition.contains(r.account_id)) {
            if (unknown.insert(r.account_id).second)
                gaps.push_back(fmt::format("responses from '{}' ignored: no group label", r.account_id.str()));
            continue;
        }
        ix.answers[{r.account_id, r.phase}][r.item_key] = r.value;
    }
    return ix;
}

const Answers* answers_of(const Indexed& ix, const AccountId& id, SurveyPhase phase) {
    auto it = ix.answers.find({id, phase});
    return it == ix.answers.end() ? nullptr : &it->second;
}

BetweenGroupRow between_row(std::string_view key, const Indexed& ix, const InstrumentSet& instruments,
                            const TestOptions& options) {
    BetweenGroupRow row;
    row.measure = std::string(key);
    const auto* def = instruments.find(key);
    const auto* item = def ? def->find(key) : nullptr;
    if (!item) {
        row.gap = fmt::format("{}: no instrument definition", key);
        return row;
    }
    std::vector<double> many, few;
    std::vector<std::string> rejected;
    for (const auto& id : ix.order) {
        const auto* a = answers_of(ix, id, SurveyPhase::post);
        if (!a) continue;
        auto it = a->find(row.measure);
        if (it == a->end()) continue;
        if (it->second < item->response_min || it->second > item->response_max) {
            rejected.push_back(id.str());
            continue;
        }
        (ix.condition.at(id) == Condition::many_likes ? many : few).push_back(it->second);
    }
    if (!many.empty()) row.many = descriptives(many);
    if (!few.empty()) row.few = descriptives(few);
    std::vector<std::string> problems;
    if (!rejected.empty())
        problems.push_back(fmt::format("out-of-range answers from [{}] excluded", fmt::join(rejected, ", ")));
    if (many.empty()) problems.push_back("no POST answers from MANY_LIKES participants");
    if (few.empty()) problems.push_back("no POST answers from FEW_LIKES participants");
    if (!many.empty() && !few.empty()) row.test = mann_whitney_u(many, few, options);
    if (!problems.empty()) row.gap = fmt::format("{}: {}", key, fmt::join(problems, "; "));
    return row;
}

WithinGroupRow within_row(const InstrumentDefinition& def, Condition condition, const Indexed& ix,
                          const TestOptions& options, std::vector<std::string>& gaps) {
    WithinGroupRow row;
    row.instrument = def.instrument_id();
    row.condition = condition;
    std::vector<double> pre, post;
    for (const auto& id : ix.order) {
        if (ix.condition.at(id) != condition) continue;
        std::optional<int> scores[2];
        for (auto phase : {SurveyPhase::pre, SurveyPhase::post}) {
            const auto* a = answers_of(ix, id, phase);
            SurveyResponse response{id, phase, a ? *a : Answers{}};
            const auto violations = validate_response(response, def);
            if (violations.empty()) {
                scores[phase == SurveyPhase::post] = score_scale(response, def);
            } else if (violations.size() == def.items().size() &&
                       std::all_of(violations.begin(), violations.end(), [](const auto& v) {
                           return v.kind == ResponseViolation::Kind::missing;
                       })) {
                gaps.push_back(fmt::format("{}: '{}' has no {} answers", def.instrument_id(), id.str(), to_string(phase)));
            } else {
                gaps.push_back(fmt::format("{}: '{}' {} answers unusable: {}", def.instrument_id(), id.str(),
                                           to_string(phase), violations.front().message));
            }
        }
        if (scores[0] && scores[1]) {
            pre.push_back(*scores[0]);
            post.push_back(*scores[1]);
        }
    }
    row.n_pairs = pre.size();
    if (pre.empty()) {
        row.gap = fmt::format("{} {}: no complete pre/post pairs", def.instrument_id(), to_string(condition));
        return row;
    }
    row.pre = descriptives(pre);
    row.post = descriptives(post);
    try {
        row.test = wilcoxon_signed_rank(pre, post, options);
    } catch (const Error& e) {
        row.gap = fmt::format("{} {}: {}", def.instrument_id(), to_string(condition), e.what());
    }
    return row;
}

}  // namespace

ResultsReport build_results_report(const StudyData& data, const InstrumentSet& instruments,
                                   const TestOptions& options) {
    ResultsReport report;
    const auto ix = index(data, report.gaps);
    for (const auto& [id, c] : ix.condition) ++(c == Condition::many_likes ? report.n_many : report.n_few);
    if (data.participants.empty()) report.gaps.push_back("no participants with group labels");

    for (auto key : instruments::kSingleItems) {
        report.between.push_back(between_row(key, ix, instruments, options));
        if (report.between.back().gap) report.gaps.push_back(*report.between.back().gap);
    }
    for (auto id : {instruments::kLoneliness, instruments::kSelfEsteem}) {
        const auto* def = instruments.find(id);
        for (auto c : {Condition::many_likes, Condition::few_likes}) {
            if (!def) {
                WithinGroupRow row;
                row.instrument = std::string(id);
                row.condition = c;
                row.gap = fmt::format("{}: no instrument definition", id);
                report.gaps.push_back(*row.gap);
                report.within.push_back(std::move(row));
                continue;
            }
            report.within.push_back(within_row(*def, c, ix, options, report.gaps));
            if (report.within.back().gap) report.gaps.push_back(*report.within.back().gap);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

std::string cell(const std::optional<Descriptives>& d) { return d ? format_mean_sd(*d) : "-"; }

std::string median_cell(const std::optional<Descriptives>& d) {
    return d ? fmt::format("{:.1f}", d->median) : "-";
}

}  // namespace

std::string render_text(const ResultsReport& report) {
    std::string out;
    out += fmt::format("Participants: {} MANY_LIKES, {} FEW_LIKES\n\n", report.n_many, report.n_few);
    out += "Between-group comparisons on POST answers (A = MANY_LIKES)\n";
    out += fmt::format("{:<24} {:>14} {:>14} {:>8} {:>6} {:>7}  {}\n", "Measure", "Many M (SD)", "Few M (SD)",
                       "U_min", "r", "p", "method");
    for (const auto& row : report.between) {
        if (row.test) {
            out += fmt::format("{:<24} {:>14} {:>14} {:>8.1f} {:>6} {:>7}  {}\n", row.measure, cell(row.many),
                               cell(row.few), row.test->u_min, format_decimal(row.test->r_rank_biserial),
                               format_p(row.test->p_two_sided), to_string(row.test->method));
        } else {
            out += fmt::format("{:<24} {:>14} {:>14} {:>8} {:>6} {:>7}\n", row.measure, cell(row.many),
                               cell(row.few), "-", "-", "-");
        }
    }
    out += "\nWithin-group comparisons, post - pre\n";
    out += fmt::format("{:<24} {:<11} {:>4} {:>8} {:>8} {:>6} {:>7}  {}\n", "Scale", "Condition", "n", "Pre Mdn",
                       "Post Mdn", "Z", "p", "method");
    for (const auto& row : report.within) {
        if (row.test) {
            out += fmt::format("{:<24} {:<11} {:>4} {:>8} {:>8} {:>6} {:>7}  {}\n", row.instrument,
                               to_string(row.condition), row.n_pairs, median_cell(row.pre), median_cell(row.post),
                               format_decimal(row.test->z), format_p(row.test->p_two_sided),
                               to_string(row.test->method));
        } else {
            out += fmt::format("{:<24} {:<11} {:>4} {:>8} {:>8} {:>6} {:>7}\n", row.instrument,
                               to_string(row.condition), row.n_pairs, median_cell(row.pre), median_cell(row.post),
                               "-", "-");
        }
    }
    if (!report.gaps.empty()) {
        out += "\nGaps\n";
        for (const auto& g : report.gaps) out += fmt::format("  - {}\n", g);
    }
    return out;
}

std::string render_csv(const ResultsReport& report) {
    const std::vector<std::string> header{"kind",   "measure", "condition", "n_a",     "n_b",       "mean_a",
                                          "sd_a",   "median_a", "mean_b",   "sd_b",    "median_b",  "statistic",
                                          "r",      "z",       "p",         "p_display", "method",  "gap"};
    auto num = [](std::optional<double> v) { return v ? fmt::format("{}", *v) : std::string(); };
    auto desc = [&](const std::optional<Descriptives>& d, std::vector<std::string>& f) {
        f.push_back(d ? num(d->mean) : "");
        f.push_back(d && d->sd ? num(*d->sd) : "");
        f.push_back(d ? num(d->median) : "");
    };
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : report.between) {
        std::vector<std::string> f{"between", row.measure, ""};
        f.push_back(row.many ? std::to_string(row.many->n) : "0");
        f.push_back(row.few ? std::to_string(row.few->n) : "0");
        desc(row.many, f);
        desc(row.few, f);
        const auto& t = row.test;
        f.push_back(t ? num(t->u_min) : "");
        f.push_back(t ? num(t->r_rank_biserial) : "");
        f.push_back(t ? num(t->z) : "");
        f.push_back(t ? num(t->p_two_sided) : "");
        f.push_back(t ? format_p(t->p_two_sided) : "");
        f.push_back(t ? std::string(to_string(t->method)) : "");
        f.push_back(row.gap.value_or(""));
        rows.push_back(std::move(f));
    }
    for (const auto& row : report.within) {
        std::vector<std::string> f{"within", row.instrument, std::string(to_string(row.condition)),
                                   std::to_string(row.n_pairs), std::to_string(row.n_pairs)};
        desc(row.pre, f);
        desc(row.post, f);
        const auto& t = row.test;
        f.push_back(t ? num(t->w_plus) : "");
        f.push_back("");
        f.push_back(t ? num(t->z) : "");
        f.push_back(t ? num(t->p_two_sided) : "");
        f.push_back(t ? format_p(t->p_two_sided) : "");
        f.push_back(t ? std::string(to_string(t->method)) : "");
        f.push_back(row.gap.value_or(""));
        rows.push_back(std::move(f));
    }
    return csv::write(header, rows);
}

namespace {

nlohmann::json desc_json(const std::optional<Descriptives>& d) {
    if (!d) return nullptr;
    return {{"n", d->n},
            {"mean", d->mean},
            {"sd", d->sd ? nlohmann::json(*d->sd) : nlohmann::json(nullptr)},
            {"median", d->median},
            {"display", format_mean_sd(*d)}};
}

nlohmann::json opt(const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const ResultsReport& report) {
    auto between = nlohmann::json::array();
    for (const auto& row : report.between) {
        nlohmann::json test = nullptr;
        if (row.test) {
            const auto& t = *row.test;
            test = {{"n_a", t.n_a},   {"n_b", t.n_b}, {"u_a", t.u_a},
                    {"u_b", t.u_b},   {"u_min", t.u_min}, {"r", t.r_rank_biserial},
                    {"z", t.z},       {"p", t.p_two_sided}, {"p_display", format_p(t.p_two_sided)},
                    {"method", to_string(t.method)}};
        }
        between.push_back({{"measure", row.measure},
                           {"many_likes", desc_json(row.many)},
                           {"few_likes", desc_json(row.few)},
                           {"test", test},
                           {"gap", opt(row.gap)}});
    }
    auto within = nlohmann::json::array();
    for (const auto& row : report.within) {
        nlohmann::json test = nullptr;
        if (row.test) {
            const auto& t = *row.test;
            test = {{"n_effective", t.n_effective}, {"w_plus", t.w_plus}, {"w_minus", t.w_minus},
                    {"z", t.z}, {"p", t.p_two_sided}, {"p_display", format_p(t.p_two_sided)},
                    {"method", to_string(t.method)}};
        }
        within.push_back({{"instrument", row.instrument},
                          {"condition", to_string(row.condition)},
                          {"n_pairs", row.n_pairs},
                          {"pre", desc_json(row.pre)},
                          {"post", desc_json(row.post)},
                          {"test", test},
                          {"gap", opt(row.gap)}});
    }
    return {{"participants", {{"MANY_LIKES", report.n_many}, {"FEW_LIKES", report.n_few}}},
            {"between", between},
            {"within", within},
            {"gaps", report.gaps}};
}

}  // namespace fakebook::stats
