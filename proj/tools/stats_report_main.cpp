// stats-report: results tables from one or more experiment exports.
#include "fakebook/core/error.hpp"
#include "fakebook/stats/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    using namespace fakebook;
    CLI::App app{"Between-group and pre/post statistics from experiment exports"};
    std::string export_dir, out_file, format = "text", instruments_file;
    bool continuity = false;
    app.add_option("--export", export_dir, "Export directory, or a directory of export directories")
        ->required()
        ->check(CLI::ExistingDirectory);
    app.add_option("--out", out_file, "Output file (default: stdout)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--instruments", instruments_file, "Instrument definition JSON")->check(CLI::ExistingFile);
    app.add_flag("--continuity-correction", continuity, "Apply the 0.5 continuity correction to normal approximations");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage errors exit 64; --help and --version exit 0.
        return app.exit(e) == 0 ? 0 : 64;
    }

    try {
        const auto data = stats::load_study(export_dir);
        const auto instruments =
            instruments_file.empty() ? instruments::default_set() : InstrumentSet::load(instruments_file);
        stats::TestOptions options;
        options.continuity_correction = continuity;
        const auto report = stats::build_results_report(data, instruments, options);

        std::string text;
        if (format == "json")
            text = stats::to_json(report).dump(2) + "\n";
        else if (format == "csv")
            text = stats::render_csv(report);
        else
            text = stats::render_text(report);

        if (out_file.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
            if (!out) {
                std::cerr << "stats-report: cannot write '" << out_file << "'\n";
                return 1;
            }
            out << text;
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "stats-report: " << e.what() << "\n";
        return e.code() == ErrorCode::not_found ? 2 : 1;
    }
}
