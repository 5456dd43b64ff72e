// File: include/reldiv/evaluation.hpp
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reldiv/catalog.hpp"
#include "reldiv/diversity.hpp"
#include "reldiv/error.hpp"
#include "reldiv/random.hpp"

namespace reldiv {

inline constexpr std::int64_t kDefaultGapSeconds = 900;  // 15 minutes

/// A maximal consultation run with no inter-consultation gap above the
/// threshold. Indices refer to positions in the user's stream, the same
/// indexing DiversityPoint and ContextChange use.
struct Session {
    std::string user_id;
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    std::int64_t start_ts = 0;
    std::int64_t end_ts = 0;
};

/// Greedy left-to-right split: a new session starts exactly when the gap to
/// the previous consultation exceeds the threshold. Every consultation
/// belongs to exactly one session.
inline std::vector<Session> sessionize(const std::vector<Consultation>& stream,
                                       std::int64_t gap_threshold = kDefaultGapSeconds) {
    std::vector<Session> sessions;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (i > 0 && stream[i].timestamp < stream[i - 1].timestamp) {
            throw OrderingError("sessionize: stream not sorted at index " +
                                std::to_string(i));
        }
        if (i == 0 || stream[i].timestamp - stream[i - 1].timestamp > gap_threshold) {
            sessions.push_back(Session{stream[i].user_id, i, i, stream[i].timestamp,
                                       stream[i].timestamp});
        } else {
            sessions.back().end_index = i;
            sessions.back().end_ts = stream[i].timestamp;
        }
    }
    return sessions;
}

/// Alignment of detected context changes with session boundaries. A session
/// counts as detected iff a change fired exactly on its first consultation.
/// First sessions stay in the denominator even though the empty history makes
/// them undetectable.
struct H1Report {
    std::size_t total_sessions = 0;
    std::size_t detected_sessions = 0;
    std::size_t total_changes = 0;
    std::size_t non_session_changes = 0;
    double session_rate = 0.0;

    H1Report& operator+=(const H1Report& other) {
        total_sessions += other.total_sessions;
        detected_sessions += other.detected_sessions;
        total_changes += other.total_changes;
        non_session_changes += other.non_session_changes;
        session_rate = total_sessions == 0
                           ? 0.0
                           : static_cast<double>(detected_sessions) /
                                 static_cast<double>(total_sessions);
        return *this;
    }
};

inline H1Report align_sessions(const std::vector<ContextChange>& changes,
                               const std::vector<Session>& sessions) {
    H1Report report;
    report.total_sessions = sessions.size();
    report.total_changes = changes.size();
    std::size_t ci = 0;
    for (const Session& s : sessions) {
        while (ci < changes.size() && changes[ci].index < s.start_index) ++ci;
        if (ci < changes.size() && changes[ci].index == s.start_index) {
            ++report.detected_sessions;
        }
    }
    report.non_session_changes = report.total_changes - report.detected_sessions;
    report.session_rate = report.total_sessions == 0
                              ? 0.0
                              : static_cast<double>(report.detected_sessions) /
                                    static_cast<double>(report.total_sessions);
    return report;
}

/// Detection and session alignment over every user stream of a corpus.
struct CorpusRunResult {
    std::map<std::string, StreamResult> streams;
    std::map<std::string, std::vector<Session>> sessions;
    H1Report report;

    std::size_t total_changes() const { return report.total_changes; }
};

inline CorpusRunResult run_corpus(const Catalog& catalog, const UserLog& log,
                                  const Schema& schema, std::size_t window_capacity,
                                  double tau,
                                  std::int64_t gap_threshold = kDefaultGapSeconds) {
    CorpusRunResult result;
    for (const auto& [user, stream] : log) {
        StreamResult run = run_user_stream(stream, catalog, schema, window_capacity, tau);
        std::vector<Session> sessions = sessionize(stream, gap_threshold);
        result.report += align_sessions(run.changes, sessions);
        result.streams.emplace(user, std::move(run));
        result.sessions.emplace(user, std::move(sessions));
    }
    return result;
}

/// Calibration pass over the whole corpus: one detection sweep with an
/// unreachable threshold, pooling every user's diversity values.
inline TauCalibration calibrate_corpus(const Catalog& catalog, const UserLog& log,
                                       const Schema& schema,
                                       std::size_t window_capacity) {
    std::vector<DiversityPoint> all_points;
    for (const auto& [user, stream] : log) {
        // tau = 2 can never fire: rd <= 1 and the comparison is strict.
        StreamResult run = run_user_stream(stream, catalog, schema, window_capacity, 2.0);
        for (auto& p : run.points) all_points.push_back(std::move(p));
    }
    return calibrate_tau(all_points);
}

/// One sparsity level of the degradation sweep.
struct SweepRow {
    double sparsity = 0.0;
    double session_rate = 0.0;
    std::size_t total_changes = 0;
    std::uint64_t seed = 0;  // the sub-seed this row's deletion used
};

/// Degrades the catalog to each requested sparsity rate (fresh sub-seed per
/// rate) and reruns detection over all users. Rows are deterministic given
/// the master seed; sessions come from the untouched log.
inline std::vector<SweepRow> sparsity_sweep(const Catalog& catalog, const UserLog& log,
                                            const Schema& schema,
                                            std::size_t window_capacity, double tau,
                                            const std::vector<double>& rates,
                                            std::uint64_t seed,
                                            std::int64_t gap_threshold = kDefaultGapSeconds) {
    std::vector<SweepRow> rows;
    rows.reserve(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const std::uint64_t sub_seed = derive_seed(seed, "sparsity", i);
        const Catalog degraded = degrade_catalog(catalog, rates[i], sub_seed);
        const CorpusRunResult run =
            run_corpus(degraded, log, schema, window_capacity, tau, gap_threshold);
        rows.push_back(SweepRow{rates[i], run.report.session_rate,
                                run.report.total_changes, sub_seed});
    }
    return rows;
}

/// Aggregated outcome of repeated type-split trials at one (x, y) setting.
/// `contexts` counts the detected context changes per run.
struct TypeSplitRow {
    std::size_t attrs_per_type = 0;  // x
    std::size_t min_common = 0;      // y
    std::size_t runs = 0;
    double session_rate_avg = 0.0;
    double session_rate_sd = 0.0;
    double contexts_avg = 0.0;
    double contexts_sd = 0.0;
};

namespace detail {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

inline MeanSd mean_and_population_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) sq += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(sq / static_cast<double>(xs.size()));
    return out;
}

}  // namespace detail

/// Repeats split_types + full detection `runs` times with distinct
/// sub-seeds and reports averages and population standard deviations.
inline TypeSplitRow type_split_experiment(const Catalog& catalog, const UserLog& log,
                                          const Schema& schema,
                                          std::size_t window_capacity, double tau,
                                          std::size_t num_types, std::size_t attrs_per_type,
                                          std::size_t min_common, std::size_t runs,
                                          std::uint64_t seed,
                                          std::int64_t gap_threshold = kDefaultGapSeconds) {
    if (runs < 1) throw ArgumentError("type_split_experiment: runs must be >= 1");
    std::vector<double> rates;
    std::vector<double> changes;
    for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t sub_seed = derive_seed(seed, "typesplit", r);
        const Catalog split =
            split_types(catalog, num_types, attrs_per_type, min_common, sub_seed);
        const CorpusRunResult run =
            run_corpus(split, log, schema, window_capacity, tau, gap_threshold);
        rates.push_back(run.report.session_rate);
        changes.push_back(static_cast<double>(run.report.total_changes));
    }
    const auto rate_stats = detail::mean_and_population_sd(rates);
    const auto change_stats = detail::mean_and_population_sd(changes);
    TypeSplitRow row;
    row.attrs_per_type = attrs_per_type;
    row.min_common = min_common;
    row.runs = runs;
    row.session_rate_avg = rate_stats.mean;
    row.session_rate_sd = rate_stats.sd;
    row.contexts_avg = change_stats.mean;
    row.contexts_sd = change_stats.sd;
    return row;
}

}  // namespace reldiv
