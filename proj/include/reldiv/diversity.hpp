// File: include/reldiv/diversity.hpp
#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "reldiv/catalog.hpp"
#include "reldiv/error.hpp"
#include "reldiv/item.hpp"
#include "reldiv/schema.hpp"
#include "reldiv/similarity.hpp"

namespace reldiv {

/// The k most recently consulted items of one user, oldest first. Pushing
/// into a full window evicts exactly the oldest entry. Entries are value
/// snapshots; later catalog changes never rewrite history.
class HistoryWindow {
public:
    explicit HistoryWindow(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) {
            throw ArgumentError("HistoryWindow: capacity must be positive");
        }
    }

    void push(Item item) {
        if (entries_.size() == capacity_) entries_.pop_front();
        entries_.push_back(std::move(item));
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::size_t capacity_;
    std::deque<Item> entries_;
};

/// Relative diversity of one step. `rd` is the aggregate over attributes;
/// `computable_count` is the number of history items whose item-level
/// similarity existed (the divisor of the mean). Both the aggregate and the
/// per-attribute breakdown use the explicit not-computable marker, never 0,
/// when nothing could be measured.
struct DiversityPoint {
    std::size_t index = 0;
    SimResult rd = SimResult::not_computable();
    std::size_t computable_count = 0;             // in [0, window size]
    std::vector<SimResult> per_attribute_rd;      // aligned to the schema
};

/// Relative diversity of `target` against the window: the mean of
/// (1 - sim(target, entry)) over the entries whose similarity is computable.
/// Not computable when the window is empty or no entry pairs up. The
/// per-attribute breakdown applies the same mean attribute by attribute.
/// Entries are folded oldest-first, so a batch recomputation over the same
/// prefix reproduces the value bit for bit.
inline DiversityPoint relative_diversity(const Item& target, const HistoryWindow& window,
                                         const Schema& schema) {
    DiversityPoint point;
    point.per_attribute_rd.assign(schema.size(), SimResult::not_computable());

    double dissim_sum = 0.0;
    std::vector<double> attr_sums(schema.size(), 0.0);
    std::vector<std::size_t> attr_counts(schema.size(), 0);

    for (const Item& entry : window) {
        const ItemSimilarity sim = sim_items(target, entry, schema);
        if (sim.aggregate.computable()) {
            dissim_sum += 1.0 - sim.aggregate.get();
            ++point.computable_count;
        }
        for (std::size_t a = 0; a < schema.size(); ++a) {
            if (sim.per_attribute[a].computable()) {
                attr_sums[a] += 1.0 - sim.per_attribute[a].get();
                ++attr_counts[a];
            }
        }
    }

    if (point.computable_count > 0) {
        point.rd = SimResult::value(dissim_sum /
                                    static_cast<double>(point.computable_count));
    }
    for (std::size_t a = 0; a < schema.size(); ++a) {
        if (attr_counts[a] > 0) {
            point.per_attribute_rd[a] =
                SimResult::value(attr_sums[a] / static_cast<double>(attr_counts[a]));
        }
    }
    return point;
}

/// A diversity peak crossing the threshold: the first item of a new
/// implicit context.
struct ContextChange {
    std::size_t index = 0;
    double rd_value = 0.0;
    std::string user_id;
    std::string item_id;
};

/// The four detection conditions, evaluated independently so the predicate
/// can be exercised over its full truth table. A change fires only when all
/// four hold; comparisons against a missing value are false.
struct ChangeConditions {
    bool previous_defined = false;  // RD(t-1) exists and is not NaN
    bool current_defined = false;   // RD(t) is not NaN
    bool increasing = false;        // RD(t-1) < RD(t), strict
    bool above_threshold = false;   // RD(t) > tau, strict
};

constexpr bool should_emit(const ChangeConditions& c) {
    return c.previous_defined && c.current_defined && c.increasing && c.above_threshold;
}

/// Sliding-window change detector for one user stream. Per step it computes
/// the diversity point against the current window, pushes the item, then
/// records the point as the new previous value — strictly online, no
/// lookahead. A not-computable previous value blocks detection at the
/// current step but never propagates further.
class Detector {
public:
    Detector(std::size_t window_capacity, double tau)
        : tau_(tau),
          window_(window_capacity),
          previous_rd_(SimResult::not_computable()) {}

    struct StepResult {
        DiversityPoint point;
        std::optional<ContextChange> change;
        ChangeConditions conditions;
    };

    StepResult step(const Consultation& consultation, const Item& item,
                    const Schema& schema) {
        validate_item(item, schema);  // throws before any state changes

        StepResult result;
        result.point = relative_diversity(item, window_, schema);
        result.point.index = step_index_;

        result.conditions.previous_defined = has_previous_ && previous_rd_.computable();
        result.conditions.current_defined = result.point.rd.computable();
        result.conditions.increasing = result.conditions.previous_defined &&
                                       result.conditions.current_defined &&
                                       previous_rd_.get() < result.point.rd.get();
        result.conditions.above_threshold =
            result.conditions.current_defined && result.point.rd.get() > tau_;

        if (should_emit(result.conditions)) {
            result.change = ContextChange{step_index_, result.point.rd.get(),
                                          consultation.user_id, consultation.item_id};
        }

        window_.push(item);
        previous_rd_ = result.point.rd;
        has_previous_ = true;
        ++step_index_;
        return result;
    }

    std::size_t window_capacity() const { return window_.capacity(); }
    double tau() const { return tau_; }
    std::size_t steps_taken() const { return step_index_; }

private:
    double tau_;
    HistoryWindow window_;
    SimResult previous_rd_;
    bool has_previous_ = false;
    std::size_t step_index_ = 0;
};

/// Trace and detections of one user's full stream.
struct StreamResult {
    std::vector<DiversityPoint> points;   // one per consultation, same order
    std::vector<ContextChange> changes;
};

/// Folds the detector over one user's consultations (must be sorted by
/// timestamp). Exactly one diversity point per consultation.
inline StreamResult run_user_stream(const std::vector<Consultation>& consultations,
                                    const Catalog& catalog, const Schema& schema,
                                    std::size_t window_capacity, double tau) {
    StreamResult result;
    result.points.reserve(consultations.size());
    Detector detector(window_capacity, tau);
    std::int64_t previous_ts = 0;
    for (std::size_t i = 0; i < consultations.size(); ++i) {
        const Consultation& c = consultations[i];
        if (i > 0 && c.timestamp < previous_ts) {
            throw OrderingError("user '" + c.user_id +
                                "': consultations not in timestamp order at step " +
                                std::to_string(i));
        }
        previous_ts = c.timestamp;
        auto step = detector.step(c, catalog.require(c.item_id), schema);
        result.points.push_back(std::move(step.point));
        if (step.change) result.changes.push_back(*step.change);
    }
    return result;
}

/// Threshold calibration: tau is the global mean of the computable relative
/// diversity values; the spread is reported alongside (population sd).
struct TauCalibration {
    double tau = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
};

inline TauCalibration calibrate_tau(const std::vector<DiversityPoint>& points) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : points) {
        if (p.rd.computable()) {
            sum += p.rd.get();
            ++n;
        }
    }
    if (n == 0) {
        throw CalibrationError("calibrate_tau: no computable diversity values");
    }
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const auto& p : points) {
        if (p.rd.computable()) {
            const double d = p.rd.get() - mean;
            sq += d * d;
        }
    }
    TauCalibration cal;
    cal.mean = mean;
    cal.tau = mean;
    cal.stddev = std::sqrt(sq / static_cast<double>(n));
    cal.samples = n;
    return cal;
}

}  // namespace reldiv
