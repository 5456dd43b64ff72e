// File: tests/test_similarity.cpp
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <reldiv/error.hpp>
#include <reldiv/random.hpp>
#include <reldiv/similarity.hpp>

using namespace reldiv;
using Catch::Matchers::WithinAbs;

namespace {

AttributeSpec set_spec(double weight = 1.0) {
    return {"terms", AttributeKind::SetValued, weight, {}, {}, 10.0};
}
AttributeSpec numeric_spec(double min, double max, double decay = 10.0,
                           double weight = 1.0) {
    return {"tempo", AttributeKind::Numeric, weight, NumericBounds{min, max}, {}, decay};
}
AttributeSpec coord_spec(double max_distance = kDefaultMaxDistanceKm) {
    return {"origin", AttributeKind::Coordinate, 1.0, {}, max_distance, 10.0};
}

bool bit_equal(const SimResult& a, const SimResult& b) {
    if (a.computable() != b.computable()) return false;
    if (!a.computable()) return true;
    return std::bit_cast<std::uint64_t>(a.get()) == std::bit_cast<std::uint64_t>(b.get());
}

}  // namespace

TEST_CASE("set similarity: intersection over smaller cardinality", "[similarity]") {
    const SetValue xyz = make_set({"x", "y", "z"});
    CHECK(sim_set(xyz, xyz).get() == 1.0);
    CHECK(sim_set(make_set({"x"}), make_set({"y"})).get() == 0.0);
    CHECK(sim_set(xyz, make_set({"y", "z", "w", "v"})).get() == 2.0 / 3.0);
    CHECK_FALSE(sim_set({}, xyz).computable());
    CHECK_FALSE(sim_set(xyz, {}).computable());
    CHECK_FALSE(sim_set({}, {}).computable());
}

TEST_CASE("interval similarity: overlap over larger length", "[similarity]") {
    CHECK(sim_interval({2000, 2010}, {2000, 2010}).get() == 1.0);
    CHECK(sim_interval({2000, 2010}, {2005, 2015}).get() == 0.5);
    CHECK(sim_interval({1990, 1995}, {2000, 2005}).get() == 0.0);
    // Degenerate points compare by equality.
    CHECK(sim_interval({7, 7}, {7, 7}).get() == 1.0);
    CHECK(sim_interval({7, 7}, {8, 8}).get() == 0.0);
    // A point against a proper interval has zero overlap length.
    CHECK(sim_interval({5, 5}, {0, 10}).get() == 0.0);
    CHECK(sim_interval({0, 10}, {5, 5}).get() == 0.0);
}

TEST_CASE("binary similarity is the equality indicator", "[similarity]") {
    CHECK(sim_binary(true, true).get() == 1.0);
    CHECK(sim_binary(false, false).get() == 1.0);
    CHECK(sim_binary(false, true).get() == 0.0);
    CHECK(sim_binary(true, false).get() == 0.0);
}

TEST_CASE("numeric similarity: squared-exponential kernel over the range", "[similarity]") {
    const AttributeSpec spec = numeric_spec(35.0, 239.0);
    CHECK(sim_numeric(120.0, 120.0, spec).get() == 1.0);
    CHECK_THAT(sim_numeric(35.0, 239.0, spec).get(), WithinAbs(std::exp(-10.0), 1e-15));
    CHECK_THAT(sim_numeric(35.0, 137.0, spec).get(), WithinAbs(std::exp(-2.5), 1e-15));

    const AttributeSpec gentle = numeric_spec(0.0, 1.0, 2.0);
    CHECK_THAT(sim_numeric(0.0, 1.0, gentle).get(), WithinAbs(std::exp(-2.0), 1e-15));

    // Inputs outside the declared bounds are still well-defined.
    CHECK(sim_numeric(-100.0, 500.0, spec).get() < 1e-6);

    AttributeSpec broken = spec;
    broken.numeric_bounds.reset();
    CHECK_THROWS_AS(sim_numeric(1.0, 2.0, broken), ArgumentError);
    broken.numeric_bounds = NumericBounds{5.0, 5.0};
    CHECK_THROWS_AS(sim_numeric(1.0, 2.0, broken), ArgumentError);
}

TEST_CASE("haversine distance matches frozen references", "[similarity]") {
    CHECK(haversine_km({48.85, 2.35}, {48.85, 2.35}) == 0.0);
    // Paris vs Nancy, cross-checked against an independent high-precision
    // evaluation of the same sphere model.
    CHECK_THAT(haversine_km({48.85, 2.35}, {48.69, 6.18}),
               WithinAbs(281.221472870200819, 1e-8));
    // Exact antipodes sit at half the circumference.
    CHECK_THAT(haversine_km({45.0, 0.0}, {-45.0, 180.0}),
               WithinAbs(kDefaultMaxDistanceKm, 1e-9));
    CHECK_THAT(haversine_km({90.0, 0.0}, {-90.0, 0.0}),
               WithinAbs(kDefaultMaxDistanceKm, 1e-9));
    // Symmetry.
    CHECK(haversine_km({10.0, 20.0}, {-30.0, 40.0}) ==
          haversine_km({-30.0, 40.0}, {10.0, 20.0}));
}

TEST_CASE("coordinate similarity: normalized, clamped great-circle distance",
          "[similarity]") {
    const AttributeSpec spec = coord_spec();
    CHECK(sim_coordinate({48.85, 2.35}, {48.85, 2.35}, spec).get() == 1.0);
    CHECK(sim_coordinate({45.0, 0.0}, {-45.0, 180.0}, spec).get() == 0.0);
    CHECK_THAT(sim_coordinate({48.85, 2.35}, {48.69, 6.18}, spec).get(),
               WithinAbs(0.98594952518886335, 1e-12));

    // A short normalizer saturates far-apart coordinates at 0.
    const AttributeSpec local = coord_spec(100.0);
    CHECK(sim_coordinate({0.0, 0.0}, {0.0, 90.0}, local).get() == 0.0);

    AttributeSpec broken = coord_spec();
    broken.max_distance_km.reset();
    CHECK_THROWS_AS(sim_coordinate({0, 0}, {1, 1}, broken), ArgumentError);
}

TEST_CASE("attribute similarity skips Missing on either side", "[similarity]") {
    const AttributeSpec spec = set_spec();
    const AttributeValue missing = std::monostate{};
    const AttributeValue present = make_set({"x"});
    CHECK_FALSE(sim_attribute(missing, present, spec).computable());
    CHECK_FALSE(sim_attribute(present, missing, spec).computable());
    CHECK_FALSE(sim_attribute(missing, missing, spec).computable());
    CHECK(sim_attribute(present, present, spec).get() == 1.0);
}

namespace {

Schema pq_schema() {
    Schema s;
    s.attributes.push_back({"p", AttributeKind::Binary, 1.0, {}, {}, 10.0});
    s.attributes.push_back({"q", AttributeKind::Interval, 3.0, {}, {}, 10.0});
    return s;
}

Item pq_item(std::string id, AttributeValue p, AttributeValue q) {
    Item item;
    item.id = std::move(id);
    item.values = {std::move(p), std::move(q)};
    return item;
}

}  // namespace

TEST_CASE("item similarity: weighted mean over computable attributes", "[similarity]") {
    const Schema schema = pq_schema();

    // p gives 1.0 at weight 1; q gives 0.5 at weight 3.
    const Item a = pq_item("a", true, IntervalValue{0, 10});
    const Item b = pq_item("b", true, IntervalValue{5, 15});
    const ItemSimilarity sim = sim_items(a, b, schema);
    REQUIRE(sim.aggregate.computable());
    CHECK(sim.aggregate.get() == (1.0 * 1.0 + 3.0 * 0.5) / 4.0);
    REQUIRE(sim.per_attribute.size() == 2);
    CHECK(sim.per_attribute[0].get() == 1.0);
    CHECK(sim.per_attribute[1].get() == 0.5);
}

TEST_CASE("item similarity: identity and disjoint attribute sets", "[similarity]") {
    const Schema schema = pq_schema();
    const Item a = pq_item("a", false, IntervalValue{2, 4});
    CHECK(sim_items(a, a, schema).aggregate.get() == 1.0);

    const Item p_only = pq_item("p_only", true, std::monostate{});
    const Item q_only = pq_item("q_only", std::monostate{}, IntervalValue{0, 1});
    const ItemSimilarity disjoint = sim_items(p_only, q_only, schema);
    CHECK_FALSE(disjoint.aggregate.computable());
    CHECK_FALSE(disjoint.per_attribute[0].computable());
    CHECK_FALSE(disjoint.per_attribute[1].computable());
}

TEST_CASE("item similarity: zero total weight is not computable", "[similarity]") {
    Schema schema = pq_schema();
    schema.attributes[0].weight = 0.0;  // only p is present on both items
    const Item a = pq_item("a", true, std::monostate{});
    const Item b = pq_item("b", true, std::monostate{});
    const ItemSimilarity sim = sim_items(a, b, schema);
    CHECK_FALSE(sim.aggregate.computable());
    CHECK(sim.per_attribute[0].computable());  // the attribute itself computed
}

TEST_CASE("item similarity counter increments per invocation", "[similarity]") {
    const Schema schema = pq_schema();
    const Item a = pq_item("a", true, IntervalValue{0, 1});
    const std::uint64_t before = sim_items_invocations().load();
    (void)sim_items(a, a, schema);
    (void)sim_items(a, a, schema);
    CHECK(sim_items_invocations().load() == before + 2);
}

namespace {

/// Random item over a fixed five-kind schema, with Missing injection.
Item random_item(SeededRng& rng, const Schema& schema, std::string id,
                 double missing_probability) {
    Item item;
    item.id = std::move(id);
    for (const AttributeSpec& spec : schema.attributes) {
        if (rng.chance(missing_probability)) {
            item.values.emplace_back(std::monostate{});
            continue;
        }
        switch (spec.kind) {
            case AttributeKind::SetValued: {
                std::vector<std::string> elems;
                const std::size_t n = rng.index(4);  // may be empty
                for (std::size_t i = 0; i < n; ++i) {
                    elems.push_back("e" + std::to_string(rng.index(6)));
                }
                item.values.emplace_back(make_set(std::move(elems)));
                break;
            }
            case AttributeKind::Interval: {
                const double lo = rng.uniform(0.0, 50.0);
                const double len = rng.chance(0.2) ? 0.0 : rng.uniform(0.0, 20.0);
                item.values.emplace_back(IntervalValue{lo, lo + len});
                break;
            }
            case AttributeKind::Binary:
                item.values.emplace_back(rng.chance(0.5));
                break;
            case AttributeKind::Numeric:
                item.values.emplace_back(rng.uniform(-20.0, 260.0));
                break;
            case AttributeKind::Coordinate:
                item.values.emplace_back(
                    CoordinateValue{rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0)});
                break;
        }
    }
    return item;
}

Schema mixed_schema() {
    Schema s;
    s.attributes.push_back({"terms", AttributeKind::SetValued, 2.0, {}, {}, 10.0});
    s.attributes.push_back({"years", AttributeKind::Interval, 1.0, {}, {}, 10.0});
    s.attributes.push_back({"mode", AttributeKind::Binary, 0.5, {}, {}, 10.0});
    s.attributes.push_back(
        {"tempo", AttributeKind::Numeric, 1.0, NumericBounds{35.0, 239.0}, {}, 10.0});
    s.attributes.push_back({"origin", AttributeKind::Coordinate, 1.5, {}, 5000.0, 10.0});
    return s;
}

}  // namespace

TEST_CASE("random item pairs: symmetry, range, and internal consistency",
          "[similarity]") {
    const Schema schema = mixed_schema();
    SeededRng rng(20240817);
    for (int trial = 0; trial < 500; ++trial) {
        const Item a = random_item(rng, schema, "a", 0.2);
        const Item b = random_item(rng, schema, "b", 0.2);
        const ItemSimilarity ab = sim_items(a, b, schema);
        const ItemSimilarity ba = sim_items(b, a, schema);

        REQUIRE(bit_equal(ab.aggregate, ba.aggregate));
        for (std::size_t i = 0; i < schema.size(); ++i) {
            REQUIRE(bit_equal(ab.per_attribute[i], ba.per_attribute[i]));
            if (ab.per_attribute[i].computable()) {
                REQUIRE(ab.per_attribute[i].get() >= 0.0);
                REQUIRE(ab.per_attribute[i].get() <= 1.0);
            }
        }

        // The aggregate must equal the weighted mean recomputed from the
        // per-attribute breakdown.
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (ab.per_attribute[i].computable()) {
                num += schema.attributes[i].weight * ab.per_attribute[i].get();
                den += schema.attributes[i].weight;
            }
        }
        if (den > 0.0) {
            REQUIRE(ab.aggregate.computable());
            REQUIRE(ab.aggregate.get() == num / den);
            REQUIRE(ab.aggregate.get() >= 0.0);
            REQUIRE(ab.aggregate.get() <= 1.0);
        } else {
            REQUIRE_FALSE(ab.aggregate.computable());
        }
    }
}

TEST_CASE("masking one attribute never disturbs the others", "[similarity]") {
    const Schema schema = mixed_schema();
    SeededRng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Item a = random_item(rng, schema, "a", 0.1);
        const Item b = random_item(rng, schema, "b", 0.1);
        const ItemSimilarity full = sim_items(a, b, schema);

        const std::size_t masked = rng.index(schema.size());
        Item a_masked = a;
        a_masked.values[masked] = std::monostate{};
        const ItemSimilarity partial = sim_items(a_masked, b, schema);

        REQUIRE_FALSE(partial.per_attribute[masked].computable());
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (i == masked) continue;
            REQUIRE(bit_equal(full.per_attribute[i], partial.per_attribute[i]));
        }
    }
}
