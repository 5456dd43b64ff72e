// File: include/reldiv/item.hpp
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "reldiv/error.hpp"
#include "reldiv/schema.hpp"

namespace reldiv {

/// Set-valued attribute payload, kept sorted and deduplicated so
/// intersections are a single linear merge.
using SetValue = std::vector<std::string>;

inline SetValue make_set(std::vector<std::string> elements) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    return elements;
}

struct IntervalValue {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    friend bool operator==(const IntervalValue&, const IntervalValue&) = default;
};

struct CoordinateValue {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]

    friend bool operator==(const CoordinateValue&, const CoordinateValue&) = default;
};

/// One attribute cell of an item. monostate is the explicit Missing marker;
/// it is distinct from an empty set and from any numeric value.
using AttributeValue =
    std::variant<std::monostate, SetValue, IntervalValue, bool, double, CoordinateValue>;

inline bool is_missing(const AttributeValue& v) {
    return std::holds_alternative<std::monostate>(v);
}

/// Checks that a non-Missing value matches the declared kind and its own
/// invariants. Throws ValidationError with `context` naming the offender.
inline void validate_value(const AttributeValue& value, const AttributeSpec& spec,
                           const std::string& context) {
    if (is_missing(value)) return;
    const auto fail = [&](std::string_view msg) {
        throw ValidationError(context + ", attribute '" + spec.name + "': " +
                              std::string(msg));
    };
    switch (spec.kind) {
        case AttributeKind::SetValued:
            if (!std::holds_alternative<SetValue>(value)) fail("expected a set of strings");
            break;
        case AttributeKind::Interval: {
            if (!std::holds_alternative<IntervalValue>(value)) fail("expected an interval");
            const auto& iv = std::get<IntervalValue>(value);
            if (!(iv.lo <= iv.hi)) fail("interval requires lo <= hi");
            break;
        }
        case AttributeKind::Binary:
            if (!std::holds_alternative<bool>(value)) fail("expected a binary 0/1 value");
            break;
        case AttributeKind::Numeric:
            if (!std::holds_alternative<double>(value)) fail("expected a numeric value");
            break;
        case AttributeKind::Coordinate: {
            if (!std::holds_alternative<CoordinateValue>(value)) {
                fail("expected [lat, lon] coordinates");
            }
            const auto& c = std::get<CoordinateValue>(value);
            if (!(c.lat >= -90.0 && c.lat <= 90.0)) fail("latitude outside [-90, 90]");
            if (!(c.lon >= -180.0 && c.lon <= 180.0)) fail("longitude outside [-180, 180]");
            break;
        }
    }
}

/// A catalog entry. `values` is aligned to the schema's attribute order;
/// absent attributes hold the Missing marker.
struct Item {
    std::string id;
    std::string type_id = "item";
    std::vector<AttributeValue> values;

    const AttributeValue& value_at(std::size_t attr_index) const {
        return values[attr_index];
    }

    friend bool operator==(const Item&, const Item&) = default;
};

inline void validate_item(const Item& item, const Schema& schema) {
    if (item.values.size() != schema.size()) {
        throw ValidationError("item '" + item.id + "': value vector has " +
                              std::to_string(item.values.size()) + " entries, schema has " +
                              std::to_string(schema.size()));
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        validate_value(item.values[i], schema.attributes[i], "item '" + item.id + "'");
    }
}

/// One timestamped navigation event: user u consulted item i at time ts.
struct Consultation {
    std::string user_id;
    std::int64_t timestamp = 0;  // seconds since epoch
    std::string item_id;

    friend bool operator==(const Consultation&, const Consultation&) = default;
};

}  // namespace reldiv
