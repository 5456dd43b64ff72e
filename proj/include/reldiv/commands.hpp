// File: include/reldiv/commands.hpp
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reldiv/catalog.hpp"
#include "reldiv/diversity.hpp"
#include "reldiv/error.hpp"
#include "reldiv/evaluation.hpp"
#include "reldiv/random.hpp"
#include "reldiv/report.hpp"
#include "reldiv/schema.hpp"
#include "reldiv/synthetic.hpp"

namespace reldiv {

/// Fully resolved run parameters. The CLI fills this from flags; tests fill
/// it directly. Every command echoes the resolved values it used to a
/// companion JSON file so a run can be reproduced exactly.
struct RunConfig {
    std::string schema_path;
    std::string catalog_path;
    std::string log_path;
    std::size_t k = 5;
    std::optional<double> tau;   // absent -> calibrate first
    std::int64_t gap_seconds = kDefaultGapSeconds;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";

    // h2 parameters
    std::vector<double> rates;

    // h3 parameters
    std::size_t num_types = 4;
    std::vector<std::size_t> attrs_per_type;  // x grid
    std::vector<std::size_t> min_common;      // y grid (zip, or broadcast if single)
    std::size_t runs = 10;

    // synth parameters (seed comes from `seed` above)
    SyntheticSpec synth;
};

struct LoadedCorpus {
    Schema schema;
    Catalog catalog;
    UserLog log;
};

struct ResolvedTau {
    double tau = 0.0;
    std::string source;  // "flag" or "calibrated"
    TauCalibration calibration;  // populated when source == "calibrated"
};

namespace detail {

inline LoadedCorpus load_corpus(const RunConfig& config) {
    LoadedCorpus corpus;
    corpus.schema = load_schema_file(config.schema_path);
    corpus.catalog = load_catalog_file(config.catalog_path, corpus.schema);
    corpus.log = load_log_file(config.log_path, corpus.catalog);
    return corpus;
}

inline std::uint64_t require_seed(const RunConfig& config, const char* command) {
    if (!config.seed) {
        throw ArgumentError(std::string(command) +
                            ": --seed is required (no wall-clock default)");
    }
    return *config.seed;
}

inline ResolvedTau resolve_tau(const RunConfig& config, const Catalog& catalog,
                               const UserLog& log, const Schema& schema) {
    ResolvedTau resolved;
    if (config.tau) {
        resolved.tau = *config.tau;
        resolved.source = "flag";
    } else {
        resolved.calibration = calibrate_corpus(catalog, log, schema, config.k);
        resolved.tau = resolved.calibration.tau;
        resolved.source = "calibrated";
    }
    return resolved;
}

inline nlohmann::ordered_json base_echo(const char* command, const RunConfig& config) {
    nlohmann::ordered_json echo;
    echo["command"] = command;
    if (!config.schema_path.empty()) echo["schema"] = config.schema_path;
    if (!config.catalog_path.empty()) echo["catalog"] = config.catalog_path;
    if (!config.log_path.empty()) echo["log"] = config.log_path;
    echo["k"] = config.k;
    echo["gap_seconds"] = config.gap_seconds;
    if (config.seed) echo["seed"] = *config.seed;
    echo["out_dir"] = config.out_dir;
    return echo;
}

inline void add_tau_echo(nlohmann::ordered_json& echo, const ResolvedTau& resolved) {
    echo["tau"] = resolved.tau;
    echo["tau_source"] = resolved.source;
    if (resolved.source == "calibrated") {
        echo["tau_calibration"] = {{"mean", resolved.calibration.mean},
                                   {"sd", resolved.calibration.stddev},
                                   {"samples", resolved.calibration.samples}};
    }
}

inline std::filesystem::path out_path(const RunConfig& config, const char* name) {
    return std::filesystem::path(config.out_dir) / name;
}

inline void write_echo(const RunConfig& config, const char* command,
                       const nlohmann::ordered_json& echo) {
    write_text_atomic(out_path(config, (std::string(command) + "_config.json").c_str()),
                      echo.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsResult {
    std::vector<AttributeStats> rows;
    std::filesystem::path csv_path;
};

/// Per-attribute corpus statistics -> stats.csv.
inline StatsResult cmd_stats(const RunConfig& config) {
    const Schema schema = load_schema_file(config.schema_path);
    const Catalog catalog = load_catalog_file(config.catalog_path, schema);

    StatsResult result;
    result.rows = corpus_stats(catalog);
    result.csv_path = detail::out_path(config, "stats.csv");
    write_text_atomic(result.csv_path, stats_csv(result.rows));

    auto echo = detail::base_echo("stats", config);
    detail::write_echo(config, "stats", echo);
    return result;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

struct CalibrateResult {
    TauCalibration calibration;
    std::filesystem::path csv_path;
};

/// One full detection sweep with an unreachable threshold; writes
/// calibration.csv holding {tau, mean, sd, samples}.
inline CalibrateResult cmd_calibrate(const RunConfig& config) {
    const LoadedCorpus corpus = detail::load_corpus(config);

    CalibrateResult result;
    result.calibration =
        calibrate_corpus(corpus.catalog, corpus.log, corpus.schema, config.k);
    result.csv_path = detail::out_path(config, "calibration.csv");
    write_text_atomic(result.csv_path, calibration_csv(result.calibration));

    auto echo = detail::base_echo("calibrate", config);
    echo["tau"] = result.calibration.tau;
    echo["tau_source"] = "calibrated";
    echo["tau_calibration"] = {{"mean", result.calibration.mean},
                               {"sd", result.calibration.stddev},
                               {"samples", result.calibration.samples}};
    detail::write_echo(config, "calibrate", echo);
    return result;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectResult {
    ResolvedTau tau;
    std::size_t total_changes = 0;
    std::size_t total_steps = 0;
    std::filesystem::path trace_path;
    std::filesystem::path changes_path;
};

/// Full-corpus detection: per-consultation trace records plus one record per
/// emitted change, users in sorted order.
inline DetectResult cmd_detect(const RunConfig& config) {
    const LoadedCorpus corpus = detail::load_corpus(config);
    DetectResult result;
    result.tau = detail::resolve_tau(config, corpus.catalog, corpus.log, corpus.schema);

    std::string trace;
    std::string changes;
    for (const auto& [user, stream] : corpus.log) {
        StreamResult run =
            run_user_stream(stream, corpus.catalog, corpus.schema, config.k, result.tau.tau);
        trace += trace_jsonl(stream, run);
        changes += changes_jsonl(stream, run.changes);
        result.total_changes += run.changes.size();
        result.total_steps += run.points.size();
    }

    result.trace_path = detail::out_path(config, "trace.jsonl");
    result.changes_path = detail::out_path(config, "changes.jsonl");
    write_text_atomic(result.trace_path, trace);
    write_text_atomic(result.changes_path, changes);

    auto echo = detail::base_echo("detect", config);
    detail::add_tau_echo(echo, result.tau);
    echo["total_steps"] = result.total_steps;
    echo["total_changes"] = result.total_changes;
    detail::write_echo(config, "detect", echo);
    return result;
}

// ---------------------------------------------------------------------------
// h1: session alignment
// ---------------------------------------------------------------------------

struct H1Result {
    ResolvedTau tau;
    H1Report report;
    std::filesystem::path csv_path;
};

/// Detection + sessionization + alignment over the whole corpus -> h1.csv.
inline H1Result cmd_h1(const RunConfig& config) {
    const LoadedCorpus corpus = detail::load_corpus(config);
    H1Result result;
    result.tau = detail::resolve_tau(config, corpus.catalog, corpus.log, corpus.schema);

    const CorpusRunResult run = run_corpus(corpus.catalog, corpus.log, corpus.schema,
                                           config.k, result.tau.tau, config.gap_seconds);
    result.report = run.report;
    result.csv_path = detail::out_path(config, "h1.csv");
    write_text_atomic(result.csv_path, h1_csv(result.report));

    auto echo = detail::base_echo("h1", config);
    detail::add_tau_echo(echo, result.tau);
    detail::write_echo(config, "h1", echo);
    return result;
}

// ---------------------------------------------------------------------------
// h2: sparsity sweep
// ---------------------------------------------------------------------------

struct H2Result {
    ResolvedTau tau;
    std::vector<SweepRow> rows;
    std::filesystem::path csv_path;
};

/// Catalog degradation sweep over the configured sparsity rates -> sweep.csv.
inline H2Result cmd_h2(const RunConfig& config) {
    const std::uint64_t seed = detail::require_seed(config, "h2");
    if (config.rates.empty()) throw ArgumentError("h2: --rates must not be empty");
    const LoadedCorpus corpus = detail::load_corpus(config);

    H2Result result;
    result.tau = detail::resolve_tau(config, corpus.catalog, corpus.log, corpus.schema);
    result.rows = sparsity_sweep(corpus.catalog, corpus.log, corpus.schema, config.k,
                                 result.tau.tau, config.rates, seed, config.gap_seconds);
    result.csv_path = detail::out_path(config, "sweep.csv");
    write_text_atomic(result.csv_path, sweep_csv(result.rows));

    auto echo = detail::base_echo("h2", config);
    detail::add_tau_echo(echo, result.tau);
    echo["rates"] = config.rates;
    auto sub_seeds = nlohmann::ordered_json::array();
    for (const SweepRow& row : result.rows) sub_seeds.push_back(row.seed);
    echo["sub_seeds"] = std::move(sub_seeds);
    detail::write_echo(config, "h2", echo);
    return result;
}

// ---------------------------------------------------------------------------
// h3: type-split trials
// ---------------------------------------------------------------------------

struct H3Result {
    ResolvedTau tau;
    std::vector<TypeSplitRow> rows;
    std::vector<std::uint64_t> row_seeds;
    std::filesystem::path csv_path;
};

/// Repeated type-split detection trials over an (x, y) grid -> type_split.csv.
/// Each grid row gets its own derived seed, so extending the grid never
/// perturbs existing rows.
inline H3Result cmd_h3(const RunConfig& config) {
    const std::uint64_t seed = detail::require_seed(config, "h3");
    if (config.attrs_per_type.empty()) {
        throw ArgumentError("h3: --attrs-per-type must not be empty");
    }
    std::vector<std::size_t> ys = config.min_common;
    if (ys.size() == 1 && config.attrs_per_type.size() > 1) {
        ys.assign(config.attrs_per_type.size(), ys.front());
    }
    if (ys.size() != config.attrs_per_type.size()) {
        throw ArgumentError("h3: --min-common must have one value or match "
                            "--attrs-per-type in length");
    }
    const LoadedCorpus corpus = detail::load_corpus(config);

    H3Result result;
    result.tau = detail::resolve_tau(config, corpus.catalog, corpus.log, corpus.schema);
    for (std::size_t i = 0; i < config.attrs_per_type.size(); ++i) {
        const std::uint64_t row_seed = derive_seed(seed, "h3row", i);
        result.row_seeds.push_back(row_seed);
        result.rows.push_back(type_split_experiment(
            corpus.catalog, corpus.log, corpus.schema, config.k, result.tau.tau,
            config.num_types, config.attrs_per_type[i], ys[i], config.runs, row_seed,
            config.gap_seconds));
    }
    result.csv_path = detail::out_path(config, "type_split.csv");
    write_text_atomic(result.csv_path, type_split_csv(result.rows));

    auto echo = detail::base_echo("h3", config);
    detail::add_tau_echo(echo, result.tau);
    echo["types"] = config.num_types;
    echo["attrs_per_type"] = config.attrs_per_type;
    echo["min_common"] = ys;
    echo["runs"] = config.runs;
    echo["row_seeds"] = result.row_seeds;
    detail::write_echo(config, "h3", echo);
    return result;
}

// ---------------------------------------------------------------------------
// synth: generate a planted corpus, detect, score against ground truth
// ---------------------------------------------------------------------------

struct SynthResult {
    ResolvedTau tau;
    GroundTruthReport ground_truth;
    H1Report h1;
    std::filesystem::path catalog_path;
    std::filesystem::path log_path;
    std::filesystem::path ground_truth_path;
    std::filesystem::path report_path;
    std::filesystem::path h1_path;
};

/// Generates a synthetic corpus from the configured generator settings, writes it out in
/// the standard formats, runs detection on it, and scores detections against
/// the planted boundaries (plus session alignment for reference).
inline SynthResult cmd_synth(const RunConfig& config) {
    const std::uint64_t seed = detail::require_seed(config, "synth");
    const Schema schema = load_schema_file(config.schema_path);

    SyntheticSpec spec = config.synth;
    spec.seed = seed;
    const SyntheticCorpus corpus = generate_synthetic(spec, schema);

    SynthResult result;
    result.catalog_path = detail::out_path(config, "synth_catalog.jsonl");
    result.log_path = detail::out_path(config, "synth_log.jsonl");
    write_text_atomic(result.catalog_path, catalog_jsonl(corpus.catalog));
    write_text_atomic(result.log_path, log_jsonl(corpus.log));

    std::string gt_lines;
    for (const auto& [user, boundaries] : corpus.ground_truth) {
        nlohmann::ordered_json rec;
        rec["user"] = user;
        rec["boundaries"] = boundaries;
        gt_lines += rec.dump();
        gt_lines += '\n';
    }
    result.ground_truth_path = detail::out_path(config, "synth_ground_truth.jsonl");
    write_text_atomic(result.ground_truth_path, gt_lines);

    result.tau = detail::resolve_tau(config, corpus.catalog, corpus.log, schema);
    const CorpusRunResult run = run_corpus(corpus.catalog, corpus.log, schema, config.k,
                                           result.tau.tau, config.gap_seconds);
    for (const auto& [user, stream_run] : run.streams) {
        result.ground_truth +=
            evaluate_ground_truth(stream_run.changes, corpus.ground_truth.at(user));
    }
    result.h1 = run.report;

    result.report_path = detail::out_path(config, "synth_report.csv");
    result.h1_path = detail::out_path(config, "synth_h1.csv");
    write_text_atomic(result.report_path, ground_truth_csv(result.ground_truth));
    write_text_atomic(result.h1_path, h1_csv(result.h1));

    auto echo = detail::base_echo("synth", config);
    detail::add_tau_echo(echo, result.tau);
    echo["users"] = spec.num_users;
    echo["contexts_per_user"] = spec.contexts_per_user;
    echo["items_per_context"] = spec.items_per_context;
    echo["attribute_shift"] = spec.attribute_shift;
    echo["session_gap_probability"] = spec.session_gap_probability;
    echo["numeric_noise"] = spec.numeric_noise;
    detail::write_echo(config, "synth", echo);
    return result;
}

}  // namespace reldiv
