// File: include/reldiv/schema.hpp
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "reldiv/error.hpp"

namespace reldiv {

/// Mean Earth radius used by the haversine distance, in kilometres.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Default normalizer for geographic coordinate similarity: the antipodal
/// (maximum possible) great-circle distance on the 6371 km sphere.
inline constexpr double kDefaultMaxDistanceKm = 20015.086796020572;

/// Default exponent constant of the numeric similarity kernel.
inline constexpr double kDefaultDecay = 10.0;

/// The five attribute families, each with its own similarity formula.
enum class AttributeKind { SetValued, Interval, Binary, Numeric, Coordinate };

inline std::string_view kind_name(AttributeKind kind) {
    switch (kind) {
        case AttributeKind::SetValued: return "set";
        case AttributeKind::Interval: return "interval";
        case AttributeKind::Binary: return "binary";
        case AttributeKind::Numeric: return "numeric";
        case AttributeKind::Coordinate: return "coordinate";
    }
    return "?";
}

inline AttributeKind kind_from_name(std::string_view name) {
    if (name == "set") return AttributeKind::SetValued;
    if (name == "interval") return AttributeKind::Interval;
    if (name == "binary") return AttributeKind::Binary;
    if (name == "numeric") return AttributeKind::Numeric;
    if (name == "coordinate") return AttributeKind::Coordinate;
    throw ParseError("unknown attribute kind '" + std::string(name) +
                     "' (expected set|interval|binary|numeric|coordinate)");
}

/// Inclusive value range of a numeric attribute over the corpus.
struct NumericBounds {
    double min = 0.0;
    double max = 0.0;

    double range() const { return max - min; }
    friend bool operator==(const NumericBounds&, const NumericBounds&) = default;
};

/// Declaration of one attribute: its kind, its weight in the aggregate
/// similarity, and the normalization constants its formula needs.
struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::SetValued;
    double weight = 1.0;
    std::optional<NumericBounds> numeric_bounds;  // numeric kind only
    std::optional<double> max_distance_km;        // coordinate kind only
    double decay = kDefaultDecay;                 // numeric kind only

    friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

/// The attribute universe shared by every similarity computation. Immutable
/// after load; the declaration order is canonical and also fixes the layout
/// of per-item value vectors.
struct Schema {
    std::vector<AttributeSpec> attributes;

    std::size_t size() const { return attributes.size(); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < attributes.size(); ++i) {
            if (attributes[i].name == name) return i;
        }
        return std::nullopt;
    }

    const AttributeSpec* find(std::string_view name) const {
        auto idx = index_of(name);
        return idx ? &attributes[*idx] : nullptr;
    }

    /// Checks every schema invariant; throws ValidationError naming the
    /// offending attribute and rule.
    void validate() const {
        std::unordered_map<std::string_view, int> seen;
        bool any_positive_weight = false;
        for (const auto& spec : attributes) {
            if (spec.name.empty()) {
                throw ValidationError("schema: attribute with empty name");
            }
            if (++seen[spec.name] > 1) {
                throw ValidationError("schema: duplicate attribute name '" + spec.name + "'");
            }
            if (!(spec.weight >= 0.0)) {
                throw ValidationError("attribute '" + spec.name + "': weight must be >= 0");
            }
            any_positive_weight = any_positive_weight || spec.weight > 0.0;
            if (spec.kind == AttributeKind::Numeric) {
                if (!spec.numeric_bounds) {
                    throw ValidationError("attribute '" + spec.name +
                                          "': numeric kind requires min/max bounds");
                }
                if (!(spec.numeric_bounds->min < spec.numeric_bounds->max)) {
                    throw ValidationError("attribute '" + spec.name +
                                          "': numeric bounds require min < max");
                }
                if (!(spec.decay > 0.0)) {
                    throw ValidationError("attribute '" + spec.name + "': decay must be > 0");
                }
            }
            if (spec.kind == AttributeKind::Coordinate) {
                if (!spec.max_distance_km || !(*spec.max_distance_km > 0.0)) {
                    throw ValidationError("attribute '" + spec.name +
                                          "': coordinate kind requires max_distance > 0");
                }
            }
        }
        if (!attributes.empty() && !any_positive_weight) {
            throw ValidationError("schema: at least one attribute must have weight > 0");
        }
    }

    friend bool operator==(const Schema&, const Schema&) = default;
};

namespace detail {

inline double require_number(const nlohmann::json& entry, const char* field,
                             const std::string& attr) {
    if (!entry.contains(field)) {
        throw ValidationError("attribute '" + attr + "': missing required field '" +
                              field + "'");
    }
    if (!entry[field].is_number()) {
        throw ParseError("attribute '" + attr + "': field '" + field + "' must be a number");
    }
    return entry[field].get<double>();
}

inline void reject_field(const nlohmann::json& entry, const char* field,
                         const std::string& attr, std::string_view reason) {
    if (entry.contains(field)) {
        throw ValidationError("attribute '" + attr + "': field '" + field + "' " +
                              std::string(reason));
    }
}

}  // namespace detail

/// Parses a schema document. The document is a JSON object with an
/// "attributes" array; each entry declares name, kind, and the fields that
/// kind requires:
///
///   {"attributes": [
///     {"name": "tempo", "kind": "numeric", "weight": 1, "min": 35, "max": 239},
///     {"name": "terms", "kind": "set"},
///     {"name": "location", "kind": "coordinate"}
///   ]}
///
/// weight defaults to 1, decay (numeric only) to 10, and max_distance
/// (coordinate only) to the antipodal geographic distance.
inline Schema load_schema(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("schema document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("attributes") || !doc["attributes"].is_array()) {
        throw ParseError("schema document: expected an object with an 'attributes' array");
    }

    static constexpr const char* known[] = {"name", "kind", "weight", "min",
                                            "max",  "decay", "max_distance"};
    Schema schema;
    for (const auto& entry : doc["attributes"]) {
        if (!entry.is_object()) {
            throw ParseError("schema document: attribute entries must be objects");
        }
        if (!entry.contains("name") || !entry["name"].is_string()) {
            throw ParseError("schema document: attribute entry missing string 'name'");
        }
        AttributeSpec spec;
        spec.name = entry["name"].get<std::string>();
        for (auto it = entry.begin(); it != entry.end(); ++it) {
            bool recognized = false;
            for (const char* k : known) recognized = recognized || it.key() == k;
            if (!recognized) {
                throw ParseError("attribute '" + spec.name + "': unknown field '" +
                                 it.key() + "'");
            }
        }
        if (!entry.contains("kind") || !entry["kind"].is_string()) {
            throw ParseError("attribute '" + spec.name + "': missing string 'kind'");
        }
        spec.kind = kind_from_name(entry["kind"].get<std::string>());
        if (entry.contains("weight")) {
            if (!entry["weight"].is_number()) {
                throw ParseError("attribute '" + spec.name + "': 'weight' must be a number");
            }
            spec.weight = entry["weight"].get<double>();
        }
        switch (spec.kind) {
            case AttributeKind::Numeric:
                spec.numeric_bounds =
                    NumericBounds{detail::require_number(entry, "min", spec.name),
                                  detail::require_number(entry, "max", spec.name)};
                if (entry.contains("decay")) {
                    spec.decay = detail::require_number(entry, "decay", spec.name);
                }
                detail::reject_field(entry, "max_distance", spec.name,
                                     "applies to coordinate attributes only");
                break;
            case AttributeKind::Coordinate:
                spec.max_distance_km = entry.contains("max_distance")
                                           ? detail::require_number(entry, "max_distance",
                                                                    spec.name)
                                           : kDefaultMaxDistanceKm;
                detail::reject_field(entry, "min", spec.name,
                                     "applies to numeric attributes only");
                detail::reject_field(entry, "max", spec.name,
                                     "applies to numeric attributes only");
                detail::reject_field(entry, "decay", spec.name,
                                     "applies to numeric attributes only");
                break;
            default:
                detail::reject_field(entry, "min", spec.name,
                                     "applies to numeric attributes only");
                detail::reject_field(entry, "max", spec.name,
                                     "applies to numeric attributes only");
                detail::reject_field(entry, "decay", spec.name,
                                     "applies to numeric attributes only");
                detail::reject_field(entry, "max_distance", spec.name,
                                     "applies to coordinate attributes only");
                break;
        }
        schema.attributes.push_back(std::move(spec));
    }
    schema.validate();
    return schema;
}

inline Schema load_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_schema(buf.str());
}

/// Canonical document form of a schema; load_schema(serialize(s)) == s.
inline std::string serialize(const Schema& schema) {
    nlohmann::ordered_json doc;
    doc["attributes"] = nlohmann::ordered_json::array();
    for (const auto& spec : schema.attributes) {
        nlohmann::ordered_json entry;
        entry["name"] = spec.name;
        entry["kind"] = std::string(kind_name(spec.kind));
        entry["weight"] = spec.weight;
        if (spec.kind == AttributeKind::Numeric) {
            entry["min"] = spec.numeric_bounds->min;
            entry["max"] = spec.numeric_bounds->max;
            entry["decay"] = spec.decay;
        }
        if (spec.kind == AttributeKind::Coordinate) {
            entry["max_distance"] = *spec.max_distance_km;
        }
        doc["attributes"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

/// Returns the schema with every attribute weight set to 1 (the naive
/// equal-weight configuration). Idempotent.
inline Schema default_weights(Schema schema) {
    for (auto& spec : schema.attributes) spec.weight = 1.0;
    return schema;
}

}  // namespace reldiv
