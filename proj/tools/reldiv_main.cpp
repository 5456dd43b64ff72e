// File: tools/reldiv_main.cpp
// Command-line front end: ingestion, calibration, detection, and the three
// experiment harnesses, all seeded and reproducible.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <reldiv/reldiv.hpp>

namespace {

struct CliState {
    reldiv::RunConfig config;
    double tau = 0.0;
    std::uint64_t seed = 0;
};

void add_common_options(CLI::App* cmd, CliState& state, bool needs_corpus) {
    cmd->add_option("--schema", state.config.schema_path, "Schema JSON file")
        ->required();
    if (needs_corpus) {
        cmd->add_option("--catalog", state.config.catalog_path, "Catalog JSONL file")
            ->required();
        cmd->add_option("--log", state.config.log_path, "Consultation log JSONL file")
            ->required();
    }
    cmd->add_option("-k,--window", state.config.k, "Sliding history capacity")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gap-seconds", state.config.gap_seconds,
                    "Session gap threshold in seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", state.config.out_dir, "Output directory");
}

CLI::Option* add_tau_option(CLI::App* cmd, CliState& state) {
    return cmd->add_option("--tau", state.tau,
                           "Diversity threshold (omit to calibrate from the corpus)");
}

CLI::Option* add_seed_option(CLI::App* cmd, CliState& state) {
    return cmd->add_option("--seed", state.seed,
                           "Master seed (required; runs are reproducible)");
}

std::string tau_summary(const reldiv::ResolvedTau& tau) {
    return "tau=" + reldiv::format_double(tau.tau) + " (" + tau.source + ")";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming relative-diversity context-change detector"};
    app.require_subcommand(1);

    CliState state;

    CLI::App* stats = app.add_subcommand("stats", "Per-attribute corpus statistics");
    stats->add_option("--schema", state.config.schema_path, "Schema JSON file")
        ->required();
    stats->add_option("--catalog", state.config.catalog_path, "Catalog JSONL file")
        ->required();
    stats->add_option("--out", state.config.out_dir, "Output directory");

    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Derive the diversity threshold from the corpus");
    add_common_options(calibrate, state, true);

    CLI::App* detect =
        app.add_subcommand("detect", "Stream every user and emit trace + changes");
    add_common_options(detect, state, true);
    CLI::Option* detect_tau = add_tau_option(detect, state);

    CLI::App* h1 = app.add_subcommand("h1", "Align detected changes with sessions");
    add_common_options(h1, state, true);
    CLI::Option* h1_tau = add_tau_option(h1, state);

    CLI::App* h2 = app.add_subcommand("h2", "Sparsity degradation sweep");
    add_common_options(h2, state, true);
    CLI::Option* h2_tau = add_tau_option(h2, state);
    CLI::Option* h2_seed = add_seed_option(h2, state);
    h2->add_option("--rates", state.config.rates,
                   "Sparsity rates in [0,0.99] (comma separated)")
        ->required()
        ->delimiter(',');

    CLI::App* h3 = app.add_subcommand("h3", "Type-split trials over an (x,y) grid");
    add_common_options(h3, state, true);
    CLI::Option* h3_tau = add_tau_option(h3, state);
    CLI::Option* h3_seed = add_seed_option(h3, state);
    h3->add_option("--types", state.config.num_types, "Number of item types (T)")
        ->check(CLI::PositiveNumber);
    h3->add_option("--attrs-per-type", state.config.attrs_per_type,
                   "Attributes per type (x grid, comma separated)")
        ->required()
        ->delimiter(',');
    h3->add_option("--min-common", state.config.min_common,
                   "Minimum common attributes per type pair (y; single value "
                   "broadcasts across the x grid)")
        ->required()
        ->delimiter(',');
    h3->add_option("--runs", state.config.runs, "Trials per grid row")
        ->check(CLI::PositiveNumber);

    CLI::App* synth = app.add_subcommand(
        "synth", "Generate a planted-context corpus, detect, and score it");
    add_common_options(synth, state, false);
    CLI::Option* synth_tau = add_tau_option(synth, state);
    CLI::Option* synth_seed = add_seed_option(synth, state);
    synth->add_option("--users", state.config.synth.num_users, "Number of users")
        ->check(CLI::PositiveNumber);
    synth->add_option("--contexts", state.config.synth.contexts_per_user,
                      "Contexts per user")
        ->check(CLI::PositiveNumber);
    synth->add_option("--items-per-context", state.config.synth.items_per_context,
                      "Items per context")
        ->check(CLI::PositiveNumber);
    synth->add_option("--shift", state.config.synth.attribute_shift,
                      "Fraction of attributes redrawn at each boundary");
    synth->add_option("--gap-prob", state.config.synth.session_gap_probability,
                      "Chance a boundary is also a session gap");
    synth->add_option("--noise", state.config.synth.numeric_noise,
                      "Within-context numeric spread as a fraction of range");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(stats)) {
            auto result = reldiv::cmd_stats(state.config);
            std::cout << "wrote " << result.csv_path.string() << " (" << result.rows.size()
                      << " attributes)\n";
        } else if (app.got_subcommand(calibrate)) {
            auto result = reldiv::cmd_calibrate(state.config);
            std::cout << "tau=" << reldiv::format_double(result.calibration.tau)
                      << " mean=" << reldiv::format_double(result.calibration.mean)
                      << " sd=" << reldiv::format_double(result.calibration.stddev)
                      << " samples=" << result.calibration.samples << "; wrote "
                      << result.csv_path.string() << "\n";
        } else if (app.got_subcommand(detect)) {
            if (*detect_tau) state.config.tau = state.tau;
            auto result = reldiv::cmd_detect(state.config);
            std::cout << tau_summary(result.tau) << "; steps=" << result.total_steps
                      << " changes=" << result.total_changes << "; wrote "
                      << result.trace_path.string() << " and "
                      << result.changes_path.string() << "\n";
        } else if (app.got_subcommand(h1)) {
            if (*h1_tau) state.config.tau = state.tau;
            auto result = reldiv::cmd_h1(state.config);
            std::cout << tau_summary(result.tau)
                      << "; sessions=" << result.report.total_sessions
                      << " detected=" << result.report.detected_sessions
                      << " rate=" << reldiv::format_double(result.report.session_rate)
                      << " changes=" << result.report.total_changes << "; wrote "
                      << result.csv_path.string() << "\n";
        } else if (app.got_subcommand(h2)) {
            if (*h2_tau) state.config.tau = state.tau;
            if (*h2_seed) state.config.seed = state.seed;
            auto result = reldiv::cmd_h2(state.config);
            std::cout << tau_summary(result.tau) << "; wrote " << result.csv_path.string()
                      << " (" << result.rows.size() << " rows)\n";
        } else if (app.got_subcommand(h3)) {
            if (*h3_tau) state.config.tau = state.tau;
            if (*h3_seed) state.config.seed = state.seed;
            auto result = reldiv::cmd_h3(state.config);
            std::cout << tau_summary(result.tau) << "; wrote " << result.csv_path.string()
                      << " (" << result.rows.size() << " rows)\n";
        } else if (app.got_subcommand(synth)) {
            if (*synth_tau) state.config.tau = state.tau;
            if (*synth_seed) state.config.seed = state.seed;
            auto result = reldiv::cmd_synth(state.config);
            std::cout << tau_summary(result.tau) << "; recall="
                      << reldiv::format_double(result.ground_truth.recall)
                      << " precision="
                      << reldiv::format_double(result.ground_truth.precision)
                      << " session_rate="
                      << reldiv::format_double(result.h1.session_rate) << "; wrote "
                      << result.report_path.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
