// File: include/reldiv/synthetic.hpp
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "reldiv/catalog.hpp"
#include "reldiv/diversity.hpp"
#include "reldiv/error.hpp"
#include "reldiv/random.hpp"

namespace reldiv {

/// Parameters of the planted-context corpus generator.
struct SyntheticSpec {
    std::size_t num_users = 1;
    std::size_t contexts_per_user = 1;
    std::size_t items_per_context = 1;
    /// Fraction of attributes whose values change across a context boundary.
    double attribute_shift = 1.0;
    /// Chance that a context boundary is also a session gap (> 900 s).
    double session_gap_probability = 1.0;
    /// Within-context spread of numeric values, as a fraction of the
    /// attribute range. Zero pins every in-context numeric value exactly.
    double numeric_noise = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (num_users == 0 || contexts_per_user == 0 || items_per_context == 0) {
            throw ArgumentError("SyntheticSpec: all counts must be positive");
        }
        if (!(attribute_shift >= 0.0 && attribute_shift <= 1.0)) {
            throw ArgumentError("SyntheticSpec: attribute_shift must lie in [0,1]");
        }
        if (!(session_gap_probability >= 0.0 && session_gap_probability <= 1.0)) {
            throw ArgumentError(
                "SyntheticSpec: session_gap_probability must lie in [0,1]");
        }
        if (!(numeric_noise >= 0.0 && numeric_noise < 0.5)) {
            // Noise at or above half the range would let adjacent value pools
            // touch, destroying the planted dissimilarity.
            throw ArgumentError("SyntheticSpec: numeric_noise must lie in [0,0.5)");
        }
    }
};

/// Generator output: a catalog, per-user consultation logs, and the planted
/// boundary indices (stream index of the first item of each context after
/// the first).
struct SyntheticCorpus {
    Catalog catalog;
    UserLog log;
    std::map<std::string, std::vector<std::size_t>> ground_truth;
};

/// A ready-made mixed schema for synthetic runs: `width` attributes cycling
/// through all five kinds, unit weights, numeric bounds [0,1].
inline Schema synthetic_schema(std::size_t width) {
    if (width == 0) throw ArgumentError("synthetic_schema: width must be positive");
    Schema schema;
    for (std::size_t i = 0; i < width; ++i) {
        AttributeSpec spec;
        spec.name = "a" + std::to_string(i);
        switch (i % 5) {
            case 0: spec.kind = AttributeKind::SetValued; break;
            case 1: spec.kind = AttributeKind::Interval; break;
            case 2: spec.kind = AttributeKind::Binary; break;
            case 3:
                spec.kind = AttributeKind::Numeric;
                spec.numeric_bounds = NumericBounds{0.0, 1.0};
                break;
            case 4:
                spec.kind = AttributeKind::Coordinate;
                spec.max_distance_km = kDefaultMaxDistanceKm;
                break;
        }
        schema.attributes.push_back(std::move(spec));
    }
    schema.validate();
    return schema;
}

namespace detail {

/// Per-attribute context profile. `pool` indexes the disjoint value pool the
/// profile was drawn from; bumping it and redrawing yields a value maximally
/// dissimilar to every other pool of the same attribute.
struct AttributeProfile {
    std::size_t pool = 0;
    AttributeValue value;          // shared by every item of the context
    double numeric_center = 0.0;   // numeric kind only
};

inline void redraw_profile(AttributeProfile& profile, const AttributeSpec& spec,
                           std::size_t user, std::size_t attr_index, SeededRng& rng) {
    switch (spec.kind) {
        case AttributeKind::SetValued: {
            // Three of six namespaced elements; element 0 is always present
            // so two draws from the same pool always intersect.
            const std::string prefix = "u" + std::to_string(user) + ":a" +
                                       std::to_string(attr_index) + ":p" +
                                       std::to_string(profile.pool) + ":e";
            auto picks = rng.sample_indices(5, 2);
            std::vector<std::string> elems{prefix + "0"};
            for (std::size_t p : picks) elems.push_back(prefix + std::to_string(p + 1));
            profile.value = make_set(std::move(elems));
            break;
        }
        case AttributeKind::Interval: {
            // Pools occupy disjoint windows [200p, 200p+100]; any two draws
            // from one window overlap (offsets <= 30, lengths >= 40).
            const double base = 200.0 * static_cast<double>(profile.pool);
            const double lo = base + 30.0 * rng.unit();
            const double hi = lo + 40.0 + 30.0 * rng.unit();
            profile.value = IntervalValue{lo, hi};
            break;
        }
        case AttributeKind::Binary:
            profile.value = (profile.pool % 2 == 1);
            break;
        case AttributeKind::Numeric: {
            // Alternate between the two range extremes; per-item noise is
            // applied at item-emission time, inward from the extreme.
            if (!spec.numeric_bounds) {
                throw ArgumentError("generate_synthetic: numeric attribute '" +
                                    spec.name + "' needs bounds");
            }
            profile.numeric_center = profile.pool % 2 == 0 ? spec.numeric_bounds->min
                                                           : spec.numeric_bounds->max;
            profile.value = profile.numeric_center;
            break;
        }
        case AttributeKind::Coordinate:
            // Exact antipodes: successive pools sit at maximal sphere distance.
            profile.value = profile.pool % 2 == 0 ? CoordinateValue{45.0, 0.0}
                                                  : CoordinateValue{-45.0, 180.0};
            break;
    }
}

}  // namespace detail

/// Generates a corpus of per-user context sequences. Within a context every
/// item repeats the context's drawn profile (numeric kinds jittered by
/// `numeric_noise`); at each boundary, round(attribute_shift * h) attributes
/// advance to fresh disjoint pools. Intra-context consultation gaps stay
/// well under 900 s; boundary gaps exceed 900 s with probability
/// `session_gap_probability`. Fully deterministic given the seed.
inline SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, const Schema& schema) {
    spec.validate();
    schema.validate();
    if (schema.size() == 0) {
        throw ArgumentError("generate_synthetic: schema must have attributes");
    }

    const std::size_t width = schema.size();
    const auto shifted_count = static_cast<std::size_t>(
        std::llround(spec.attribute_shift * static_cast<double>(width)));

    SyntheticCorpus corpus;
    corpus.catalog.schema = schema;

    for (std::size_t u = 0; u < spec.num_users; ++u) {
        SeededRng rng(derive_seed(spec.seed, "user", u));
        const std::string user_id = "u" + std::to_string(u);

        std::vector<detail::AttributeProfile> profiles(width);
        std::vector<Consultation> stream;
        std::vector<std::size_t> boundaries;
        std::int64_t ts = 1'000'000'000 + static_cast<std::int64_t>(u) * 1'000'000;

        for (std::size_t c = 0; c < spec.contexts_per_user; ++c) {
            if (c == 0) {
                for (std::size_t a = 0; a < width; ++a) {
                    detail::redraw_profile(profiles[a], schema.attributes[a], u, a, rng);
                }
            } else {
                boundaries.push_back(c * spec.items_per_context);
                for (std::size_t a : rng.sample_indices(width, shifted_count)) {
                    profiles[a].pool += 1;
                    detail::redraw_profile(profiles[a], schema.attributes[a], u, a, rng);
                }
            }

            for (std::size_t j = 0; j < spec.items_per_context; ++j) {
                Item item;
                item.id = user_id + "_c" + std::to_string(c) + "_i" + std::to_string(j);
                item.values.reserve(width);
                for (std::size_t a = 0; a < width; ++a) {
                    const AttributeSpec& aspec = schema.attributes[a];
                    if (aspec.kind == AttributeKind::Numeric) {
                        const auto& bounds = *aspec.numeric_bounds;
                        const double jitter =
                            spec.numeric_noise * bounds.range() * rng.unit();
                        const double center = profiles[a].numeric_center;
                        // Jitter points inward so the value stays in bounds.
                        item.values.push_back(center == bounds.min ? center + jitter
                                                                   : center - jitter);
                    } else {
                        item.values.push_back(profiles[a].value);
                    }
                }

                const bool at_boundary = c > 0 && j == 0;
                if (!stream.empty()) {
                    std::int64_t gap;
                    if (at_boundary && rng.chance(spec.session_gap_probability)) {
                        gap = 1000 + static_cast<std::int64_t>(rng.below(2601));
                    } else {
                        gap = 30 + static_cast<std::int64_t>(rng.below(271));
                    }
                    ts += gap;
                }
                stream.push_back(Consultation{user_id, ts, item.id});
                corpus.catalog.items.emplace(item.id, std::move(item));
            }
        }

        corpus.log.emplace(user_id, std::move(stream));
        corpus.ground_truth.emplace(user_id, std::move(boundaries));
    }
    return corpus;
}

/// Alignment of detected changes against planted boundaries, at index
/// tolerance w (0 = exact).
struct GroundTruthReport {
    std::size_t boundaries_total = 0;
    std::size_t boundaries_hit = 0;
    std::size_t changes_total = 0;
    std::size_t changes_matched = 0;
    double recall = 0.0;
    double precision = 0.0;
    bool recall_defined = false;
    bool precision_defined = false;

    void refresh_rates() {
        recall_defined = boundaries_total > 0;
        precision_defined = changes_total > 0;
        recall = recall_defined ? static_cast<double>(boundaries_hit) /
                                      static_cast<double>(boundaries_total)
                                : 0.0;
        precision = precision_defined ? static_cast<double>(changes_matched) /
                                            static_cast<double>(changes_total)
                                      : 0.0;
    }

    GroundTruthReport& operator+=(const GroundTruthReport& other) {
        boundaries_total += other.boundaries_total;
        boundaries_hit += other.boundaries_hit;
        changes_total += other.changes_total;
        changes_matched += other.changes_matched;
        refresh_rates();
        return *this;
    }
};

inline GroundTruthReport evaluate_ground_truth(const std::vector<ContextChange>& changes,
                                               const std::vector<std::size_t>& boundaries,
                                               std::size_t w = 0) {
    auto within = [w](std::size_t a, std::size_t b) {
        return (a >= b ? a - b : b - a) <= w;
    };
    GroundTruthReport report;
    report.boundaries_total = boundaries.size();
    report.changes_total = changes.size();
    for (std::size_t b : boundaries) {
        for (const ContextChange& ch : changes) {
            if (within(ch.index, b)) {
                ++report.boundaries_hit;
                break;
            }
        }
    }
    for (const ContextChange& ch : changes) {
        for (std::size_t b : boundaries) {
            if (within(ch.index, b)) {
                ++report.changes_matched;
                break;
            }
        }
    }
    report.refresh_rates();
    return report;
}

}  // namespace reldiv
