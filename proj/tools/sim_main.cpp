// fakebook-sim: runs scripted participants through complete studies on a
// virtual clock and writes one export directory per experiment.
#include "fakebook/core/error.hpp"
#include "fakebook/platform/simulation.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace {

using namespace fakebook;

/// Synthetic answers: many-likes participants lean positive on the
/// single items and both groups start from the same scale distributions.
class SyntheticSurveys {
public:
    SyntheticSurveys(unsigned seed, double effect) : rng_(seed), effect_(effect) {}

    sim::SurveyAnswers operator()(const ExperimentId&, Condition condition, SurveyPhase phase) {
        sim::SurveyAnswers answers;
        const double shift = condition == Condition::many_likes ? effect_ : -effect_;
        for (int i = 1; i <= 10; ++i) {
            answers[fmt::format("{}_{:02d}", instruments::kLoneliness, i)] = draw(2.5, 1.0, 1, 5);
            answers[fmt::format("{}_{:02d}", instruments::kSelfEsteem, i)] = draw(2.8, 0.8, 1, 4);
        }
        if (phase == SurveyPhase::post) {
            for (auto key : instruments::kSingleItems) {
                const bool negative = key == "stress" || key == "sadness" || key == "anxiety" || key == "rejection";
                answers[std::string(key)] = draw(negative ? -shift : shift, 1.0, -2, 2);
            }
        }
        return answers;
    }

private:
    int draw(double mean, double sd, int lo, int hi) {
        std::normal_distribution<double> d(mean, sd);
        return std::clamp(static_cast<int>(std::lround(d(rng_))), lo, hi);
    }

    std::mt19937 rng_;
    double effect_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate complete studies and export their data"};
    int per_condition = 10;
    std::string out_dir;
    unsigned seed = 1;
    double effect = 0.5;
    std::string start_text = "2024-03-04T00:00:00.000Z";
    app.add_option("--participants", per_condition, "Participants per condition")->check(CLI::Range(1, 500));
    app.add_option("--out", out_dir, "Directory receiving one export per experiment")->required();
    app.add_option("--seed", seed, "Random seed for survey answers");
    app.add_option("--effect", effect, "Shift of single-item answers between conditions");
    app.add_option("--start", start_text, "Study start (ISO-8601 UTC)");
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log every experiment created");
    CLI11_PARSE(app, argc, argv);
    if (!verbose) spdlog::set_level(spdlog::level::warn);

    try {
        const auto start = parse_instant(start_text);
        if (!start) fail(ErrorCode::validation, fmt::format("--start '{}' is not ISO-8601", start_text));
        VirtualClock clock(*start - std::chrono::hours{1});
        PlatformConfig config;
        config.password_iterations = 1000;
        Platform platform(std::move(config), clock, std::make_unique<MemoryStore>());

        sim::StudySimulation simulation(platform, clock);
        simulation.set_survey_author(SyntheticSurveys(seed, effect));
        for (int i = 0; i < per_condition; ++i) {
            simulation.enrol(Condition::many_likes, fmt::format("many{:03d}", i + 1), {}, *start);
            simulation.enrol(Condition::few_likes, fmt::format("few{:03d}", i + 1), {}, *start);
        }
        simulation.run();

        for (const auto& p : simulation.participants()) {
            const auto dir = std::filesystem::path(out_dir) / p.experiment_id.str();
            write_export(platform.export_experiment(p.experiment_id), dir);
        }
        spdlog::info("wrote {} exports to {}", simulation.participants().size(), out_dir);
        return 0;
    } catch (const std::exception& e) {
        spdlog::critical("{}", e.what());
        return 1;
    }
}
