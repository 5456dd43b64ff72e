// File: include/reldiv/similarity.hpp
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

#include "reldiv/error.hpp"
#include "reldiv/item.hpp"
#include "reldiv/schema.hpp"

namespace reldiv {

/// Outcome of a similarity computation: either a value in [0, 1] or an
/// explicit not-computable marker. The marker is never coerced to 0 — zero
/// similarity means "maximally different", not "unknown".
class SimResult {
public:
    static SimResult value(double v) {
        // Tolerate float excursions at the 1e-12 level, never beyond.
        if (v < 0.0 && v > -1e-12) v = 0.0;
        if (v > 1.0 && v < 1.0 + 1e-12) v = 1.0;
        return SimResult(v, true);
    }

    static SimResult not_computable() { return SimResult(0.0, false); }

    bool computable() const { return computable_; }

    /// Pre: computable().
    double get() const { return value_; }

    friend bool operator==(const SimResult& a, const SimResult& b) {
        if (a.computable_ != b.computable_) return false;
        return !a.computable_ || a.value_ == b.value_;
    }

private:
    SimResult(double v, bool computable) : value_(v), computable_(computable) {}

    double value_;
    bool computable_;
};

/// Cumulative number of item-pair similarity computations. The detector's
/// constant-work contract (at most k invocations per step) is asserted
/// against this counter.
inline std::atomic<std::uint64_t>& sim_items_invocations() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

/// Set similarity: |a ∩ b| / min(|a|, |b|). An empty set carries no usable
/// signal, so either side empty means not computable.
inline SimResult sim_set(const SetValue& a, const SetValue& b) {
    if (a.empty() || b.empty()) return SimResult::not_computable();
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    const double denom = static_cast<double>(std::min(a.size(), b.size()));
    return SimResult::value(static_cast<double>(common) / denom);
}

/// Interval similarity: overlap length / max(length a, length b). Two
/// degenerate point intervals compare by equality; a point against a proper
/// interval contributes zero overlap, hence 0.
inline SimResult sim_interval(const IntervalValue& a, const IntervalValue& b) {
    const double len_a = a.length();
    const double len_b = b.length();
    if (len_a == 0.0 && len_b == 0.0) {
        return SimResult::value(a.lo == b.lo ? 1.0 : 0.0);
    }
    const double overlap =
        std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
    return SimResult::value(overlap / std::max(len_a, len_b));
}

/// Binary similarity: equality indicator.
inline SimResult sim_binary(bool a, bool b) {
    return SimResult::value(a == b ? 1.0 : 0.0);
}

/// Numeric similarity: exp(-decay * ((a - b) / (max - min))^2). Inputs may
/// lie outside the declared bounds; the result is still well-defined and <= 1.
inline SimResult sim_numeric(double a, double b, const AttributeSpec& spec) {
    if (!spec.numeric_bounds || !(spec.numeric_bounds->range() > 0.0)) {
        throw ArgumentError("attribute '" + spec.name +
                            "': numeric similarity requires bounds with min < max");
    }
    const double scaled = (a - b) / spec.numeric_bounds->range();
    return SimResult::value(std::exp(-spec.decay * scaled * scaled));
}

/// Great-circle distance on the 6371 km sphere, in kilometres.
inline double haversine_km(const CoordinateValue& a, const CoordinateValue& b) {
    constexpr double kDegToRad = 0.017453292519943295;
    const double lat_a = a.lat * kDegToRad;
    const double lat_b = b.lat * kDegToRad;
    const double d_lat = (b.lat - a.lat) * kDegToRad;
    const double d_lon = (b.lon - a.lon) * kDegToRad;
    const double s_lat = std::sin(d_lat / 2.0);
    const double s_lon = std::sin(d_lon / 2.0);
    // Clamp: rounding can push h epsilon past 1 near antipodal pairs, and
    // sqrt(1 - h) must stay real there.
    const double h = std::min(
        1.0, s_lat * s_lat + std::cos(lat_a) * std::cos(lat_b) * s_lon * s_lon);
    return kEarthRadiusKm * 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

/// Coordinate similarity: 1 - distance / max_distance, clamped to [0, 1] so
/// coordinates farther apart than the normalizer saturate at 0.
inline SimResult sim_coordinate(const CoordinateValue& a, const CoordinateValue& b,
                                const AttributeSpec& spec) {
    if (!spec.max_distance_km || !(*spec.max_distance_km > 0.0)) {
        throw ArgumentError("attribute '" + spec.name +
                            "': coordinate similarity requires max_distance > 0");
    }
    const double sim = 1.0 - haversine_km(a, b) / *spec.max_distance_km;
    return SimResult::value(std::clamp(sim, 0.0, 1.0));
}

/// Similarity of two values under one attribute spec. Missing on either side
/// means the attribute contributes nothing (not computable).
inline SimResult sim_attribute(const AttributeValue& a, const AttributeValue& b,
                               const AttributeSpec& spec) {
    if (is_missing(a) || is_missing(b)) return SimResult::not_computable();
    switch (spec.kind) {
        case AttributeKind::SetValued:
            return sim_set(std::get<SetValue>(a), std::get<SetValue>(b));
        case AttributeKind::Interval:
            return sim_interval(std::get<IntervalValue>(a), std::get<IntervalValue>(b));
        case AttributeKind::Binary:
            return sim_binary(std::get<bool>(a), std::get<bool>(b));
        case AttributeKind::Numeric:
            return sim_numeric(std::get<double>(a), std::get<double>(b), spec);
        case AttributeKind::Coordinate:
            return sim_coordinate(std::get<CoordinateValue>(a),
                                  std::get<CoordinateValue>(b), spec);
    }
    return SimResult::not_computable();
}

/// Item-pair similarity with per-attribute breakdown.
struct ItemSimilarity {
    SimResult aggregate = SimResult::not_computable();
    std::vector<SimResult> per_attribute;  // aligned to the schema
};

/// Weighted similarity across the attributes computable in BOTH items:
///
///   sim(a, b) = sum(weight_x * sim_x) / sum(weight_x)   over computable x
///
/// Not computable when no attribute contributes (disjoint attribute sets,
/// all-missing overlap, or zero total weight). per_attribute reports every
/// schema attribute, with the not-computable marker where it was skipped.
inline ItemSimilarity sim_items(const Item& a, const Item& b, const Schema& schema) {
    sim_items_invocations().fetch_add(1, std::memory_order_relaxed);
    ItemSimilarity result;
    result.per_attribute.reserve(schema.size());
    double weighted_sum = 0.0;
    double weight_total = 0.0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const AttributeSpec& spec = schema.attributes[i];
        const SimResult sim = sim_attribute(a.value_at(i), b.value_at(i), spec);
        result.per_attribute.push_back(sim);
        if (sim.computable()) {
            weighted_sum += spec.weight * sim.get();
            weight_total += spec.weight;
        }
    }
    if (weight_total > 0.0) {
        result.aggregate = SimResult::value(weighted_sum / weight_total);
    }
    return result;
}

}  // namespace reldiv
