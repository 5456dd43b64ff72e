// File: tests/test_synthetic.cpp
#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <reldiv/error.hpp>
#include <reldiv/evaluation.hpp>
#include <reldiv/synthetic.hpp>

using namespace reldiv;

TEST_CASE("synthetic schema cycles through all five attribute kinds", "[synthetic]") {
    const Schema s = synthetic_schema(8);
    REQUIRE(s.size() == 8);
    CHECK(s.attributes[0].kind == AttributeKind::SetValued);
    CHECK(s.attributes[1].kind == AttributeKind::Interval);
    CHECK(s.attributes[2].kind == AttributeKind::Binary);
    CHECK(s.attributes[3].kind == AttributeKind::Numeric);
    CHECK(s.attributes[4].kind == AttributeKind::Coordinate);
    CHECK(s.attributes[5].kind == AttributeKind::SetValued);
    CHECK(s.attributes[3].numeric_bounds.has_value());
    CHECK(s.attributes[4].max_distance_km.has_value());
    CHECK(s.attributes[7].name == "a7");
    CHECK_THROWS_AS(synthetic_schema(0), ArgumentError);
}

TEST_CASE("generator: corpus shape and planted boundary indices", "[synthetic]") {
    const SyntheticSpec spec{10, 5, 20, 1.0, 1.0, 0.0, 42};
    const SyntheticCorpus corpus = generate_synthetic(spec, synthetic_schema(8));

    CHECK(corpus.catalog.items.size() == 10 * 5 * 20);
    REQUIRE(corpus.log.size() == 10);
    REQUIRE(corpus.ground_truth.size() == 10);

    std::size_t boundaries = 0;
    for (const auto& [user, b] : corpus.ground_truth) {
        CHECK(b == std::vector<std::size_t>{20, 40, 60, 80});
        boundaries += b.size();
    }
    CHECK(boundaries == 40);

    for (const auto& [user, stream] : corpus.log) {
        CHECK(stream.size() == 5 * 20);
        for (const auto& c : stream) CHECK(c.user_id == user);
    }
}

TEST_CASE("generator: a single context plants no boundaries", "[synthetic]") {
    const SyntheticSpec spec{3, 1, 10, 1.0, 1.0, 0.0, 1};
    const SyntheticCorpus corpus = generate_synthetic(spec, synthetic_schema(5));
    for (const auto& [user, b] : corpus.ground_truth) CHECK(b.empty());
}

TEST_CASE("generator: items within a context repeat the context profile",
          "[synthetic]") {
    const SyntheticSpec spec{2, 3, 8, 1.0, 1.0, 0.0, 17};
    const SyntheticCorpus corpus = generate_synthetic(spec, synthetic_schema(8));
    for (const auto& [user, stream] : corpus.log) {
        for (std::size_t c = 0; c < 3; ++c) {
            const Item& first = corpus.catalog.require(stream[c * 8].item_id);
            for (std::size_t j = 1; j < 8; ++j) {
                const Item& other = corpus.catalog.require(stream[c * 8 + j].item_id);
                CHECK(other.values == first.values);
            }
        }
    }
}

TEST_CASE("generator: fractional shift changes exactly the rounded share",
          "[synthetic]") {
    const std::size_t width = 8;
    const SyntheticSpec spec{3, 4, 6, 0.375, 1.0, 0.0, 99};  // round(0.375*8) = 3
    const SyntheticCorpus corpus = generate_synthetic(spec, synthetic_schema(width));
    for (const auto& [user, stream] : corpus.log) {
        for (std::size_t c = 0; c + 1 < 4; ++c) {
            const Item& a = corpus.catalog.require(stream[c * 6].item_id);
            const Item& b = corpus.catalog.require(stream[(c + 1) * 6].item_id);
            std::size_t differing = 0;
            for (std::size_t i = 0; i < width; ++i) {
                if (!(a.values[i] == b.values[i])) ++differing;
            }
            CHECK(differing == 3);
        }
    }
}

TEST_CASE("generator: full shift makes every boundary a clean diversity peak",
          "[synthetic]") {
    const SyntheticSpec spec{4, 5, 10, 1.0, 1.0, 0.0, 7};
    const Schema schema = synthetic_schema(8);
    const SyntheticCorpus corpus = generate_synthetic(spec, schema);

    for (const auto& [user, stream] : corpus.log) {
        const StreamResult run = run_user_stream(stream, corpus.catalog, schema, 5, 2.0);
        const std::vector<std::size_t>& boundaries = corpus.ground_truth.at(user);
        const std::set<std::size_t> boundary_set(boundaries.begin(), boundaries.end());

        double min_boundary = 2.0, max_interior = -1.0;
        for (const DiversityPoint& p : run.points) {
            if (!p.rd.computable()) continue;
            if (boundary_set.count(p.index)) {
                min_boundary = std::min(min_boundary, p.rd.get());
            } else {
                max_interior = std::max(max_interior, p.rd.get());
            }
        }
        CHECK(min_boundary > max_interior);
        CHECK(min_boundary > 0.99);  // all attributes land in fresh pools

        // Per-attribute breakdown: set-valued pools are fully disjoint across
        // a boundary, so their diversity contribution is exactly 1.
        for (std::size_t b : boundaries) {
            const DiversityPoint& p = run.points[b];
            REQUIRE(p.index == b);
            CHECK(p.per_attribute_rd[0].get() == 1.0);
            CHECK(p.per_attribute_rd[5].get() == 1.0);
        }
    }
}

TEST_CASE("generator: session gaps appear exactly at boundaries when forced",
          "[synthetic]") {
    const SyntheticSpec spec{3, 4, 7, 1.0, 1.0, 0.0, 23};
    const SyntheticCorpus corpus = generate_synthetic(spec, synthetic_schema(5));
    for (const auto& [user, stream] : corpus.log) {
        const std::set<std::size_t> boundary_set(corpus.ground_truth.at(user).begin(),
                                                 corpus.ground_truth.at(user).end());
        for (std::size_t i = 1; i < stream.size(); ++i) {
            const std::int64_t gap = stream[i].timestamp - stream[i - 1].timestamp;
            if (boundary_set.count(i)) {
                CHECK(gap > 900);
            } else {
                CHECK(gap <= 900);
            }
        }
        // And sessionize agrees: one session per context.
        CHECK(sessionize(stream).size() == 4);
    }
}

TEST_CASE("generator: zero gap probability keeps each user in one session",
          "[synthetic]") {
    const SyntheticSpec spec{3, 4, 7, 1.0, 0.0, 0.0, 23};
    const SyntheticCorpus corpus = generate_synthetic(spec, synthetic_schema(5));
    for (const auto& [user, stream] : corpus.log) {
        CHECK(sessionize(stream).size() == 1);
    }
}

TEST_CASE("generator: numeric noise stays inside its band", "[synthetic]") {
    const SyntheticSpec spec{2, 3, 10, 1.0, 1.0, 0.2, 31};
    const Schema schema = synthetic_schema(8);  // a3 is numeric with bounds [0,1]
    const SyntheticCorpus corpus = generate_synthetic(spec, schema);
    const auto idx = schema.index_of("a3");
    REQUIRE(idx.has_value());
    bool saw_nonzero_jitter = false;
    for (const auto& [id, item] : corpus.catalog.items) {
        const double v = std::get<double>(item.value_at(*idx));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK((v <= 0.2 || v >= 0.8));  // within noise*range of an extreme
        if (v != 0.0 && v != 1.0) saw_nonzero_jitter = true;
    }
    CHECK(saw_nonzero_jitter);
}

TEST_CASE("generator: identical parameters give identical corpora", "[synthetic]") {
    const SyntheticSpec spec{3, 3, 5, 0.6, 0.7, 0.1, 1234};
    const Schema schema = synthetic_schema(6);
    const SyntheticCorpus a = generate_synthetic(spec, schema);
    const SyntheticCorpus b = generate_synthetic(spec, schema);
    CHECK(a.catalog.items == b.catalog.items);
    CHECK(a.log == b.log);
    CHECK(a.ground_truth == b.ground_truth);

    SyntheticSpec other = spec;
    other.seed = 1235;
    const SyntheticCorpus c = generate_synthetic(other, schema);
    CHECK(a.catalog.items != c.catalog.items);
}

TEST_CASE("generator: parameter validation", "[synthetic]") {
    const Schema schema = synthetic_schema(5);
    SyntheticSpec spec;
    spec.num_users = 0;
    CHECK_THROWS_AS(generate_synthetic(spec, schema), ArgumentError);
    spec = SyntheticSpec{};
    spec.attribute_shift = 1.5;
    CHECK_THROWS_AS(generate_synthetic(spec, schema), ArgumentError);
    spec = SyntheticSpec{};
    spec.session_gap_probability = -0.1;
    CHECK_THROWS_AS(generate_synthetic(spec, schema), ArgumentError);
    spec = SyntheticSpec{};
    spec.numeric_noise = 0.5;
    CHECK_THROWS_AS(generate_synthetic(spec, schema), ArgumentError);
    CHECK_THROWS_AS(generate_synthetic(SyntheticSpec{}, Schema{}), ArgumentError);
}

namespace {

ContextChange change_at(std::size_t index) {
    return ContextChange{index, 0.9, "u", "x"};
}

}  // namespace

TEST_CASE("ground-truth alignment: exact matches", "[synthetic]") {
    const GroundTruthReport r =
        evaluate_ground_truth({change_at(20)}, std::vector<std::size_t>{20});
    CHECK(r.boundaries_total == 1);
    CHECK(r.boundaries_hit == 1);
    CHECK(r.changes_total == 1);
    CHECK(r.changes_matched == 1);
    CHECK(r.recall == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall_defined);
    CHECK(r.precision_defined);
}

TEST_CASE("ground-truth alignment: spurious extra change halves precision",
          "[synthetic]") {
    const GroundTruthReport r = evaluate_ground_truth({change_at(20), change_at(25)},
                                                      std::vector<std::size_t>{20});
    CHECK(r.recall == 1.0);
    CHECK(r.precision == 0.5);
    CHECK(r.changes_matched == 1);
}

TEST_CASE("ground-truth alignment: undefined rates are flagged, not faked",
          "[synthetic]") {
    // No detections at all: recall 0, precision undefined.
    const GroundTruthReport none = evaluate_ground_truth({}, std::vector<std::size_t>{20});
    CHECK(none.recall == 0.0);
    CHECK(none.recall_defined);
    CHECK(none.precision == 0.0);
    CHECK_FALSE(none.precision_defined);

    // No planted boundaries: recall undefined.
    const GroundTruthReport no_gt = evaluate_ground_truth({change_at(3)}, {});
    CHECK_FALSE(no_gt.recall_defined);
    CHECK(no_gt.recall == 0.0);
    CHECK(no_gt.precision == 0.0);
    CHECK(no_gt.precision_defined);
}

TEST_CASE("ground-truth alignment: index tolerance window", "[synthetic]") {
    const std::vector<std::size_t> gt = {20};
    CHECK(evaluate_ground_truth({change_at(21)}, gt, 0).recall == 0.0);
    CHECK(evaluate_ground_truth({change_at(21)}, gt, 1).recall == 1.0);
    CHECK(evaluate_ground_truth({change_at(19)}, gt, 1).recall == 1.0);
    CHECK(evaluate_ground_truth({change_at(18)}, gt, 1).recall == 0.0);
}

TEST_CASE("ground-truth reports accumulate", "[synthetic]") {
    GroundTruthReport a =
        evaluate_ground_truth({change_at(20)}, std::vector<std::size_t>{20});
    const GroundTruthReport b = evaluate_ground_truth({change_at(5), change_at(40)},
                                                      std::vector<std::size_t>{40, 60});
    a += b;
    CHECK(a.boundaries_total == 3);
    CHECK(a.boundaries_hit == 2);
    CHECK(a.changes_total == 3);
    CHECK(a.changes_matched == 2);
    CHECK_THAT(a.recall, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(a.precision, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
}

TEST_CASE("end to end: full shift with forced gaps is recovered almost perfectly",
          "[synthetic]") {
    const SyntheticSpec spec{5, 5, 10, 1.0, 1.0, 0.0, 4242};
    const Schema schema = synthetic_schema(8);
    const SyntheticCorpus corpus = generate_synthetic(spec, schema);
    const double tau = calibrate_corpus(corpus.catalog, corpus.log, schema, 5).tau;

    GroundTruthReport total;
    for (const auto& [user, stream] : corpus.log) {
        const StreamResult run = run_user_stream(stream, corpus.catalog, schema, 5, tau);
        total += evaluate_ground_truth(run.changes, corpus.ground_truth.at(user));
    }
    REQUIRE(total.recall_defined);
    CHECK(total.recall >= 0.95);
}
