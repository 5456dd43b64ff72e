// File: include/reldiv/catalog.hpp
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reldiv/error.hpp"
#include "reldiv/item.hpp"
#include "reldiv/random.hpp"
#include "reldiv/schema.hpp"

namespace reldiv {

/// The item universe. Immutable after load; transformations return new
/// catalogs. std::map keeps item iteration order canonical (sorted by id),
/// which every seeded transformation relies on.
struct Catalog {
    Schema schema;
    std::map<std::string, Item> items;

    const Item& require(const std::string& item_id) const {
        auto it = items.find(item_id);
        if (it == items.end()) {
            throw ReferenceError("unknown item id '" + item_id + "'");
        }
        return it->second;
    }
};

/// Per-user consultation streams, each sorted by timestamp ascending.
using UserLog = std::map<std::string, std::vector<Consultation>>;

namespace detail {

inline AttributeValue parse_attribute_value(const nlohmann::json& raw,
                                            const AttributeSpec& spec,
                                            const std::string& context) {
    const auto fail = [&](std::string_view msg) -> AttributeValue {
        throw ValidationError(context + ", attribute '" + spec.name + "': " +
                              std::string(msg));
    };
    if (raw.is_null()) return std::monostate{};
    switch (spec.kind) {
        case AttributeKind::SetValued: {
            if (!raw.is_array()) return fail("expected a list of strings");
            std::vector<std::string> elements;
            for (const auto& e : raw) {
                if (!e.is_string()) return fail("set elements must be strings");
                elements.push_back(e.get<std::string>());
            }
            return make_set(std::move(elements));
        }
        case AttributeKind::Interval: {
            if (!raw.is_array() || raw.size() != 2 || !raw[0].is_number() ||
                !raw[1].is_number()) {
                return fail("expected [lo, hi]");
            }
            return IntervalValue{raw[0].get<double>(), raw[1].get<double>()};
        }
        case AttributeKind::Binary: {
            if (raw.is_boolean()) return raw.get<bool>();
            if (raw.is_number_integer()) {
                const auto v = raw.get<std::int64_t>();
                if (v == 0 || v == 1) return v == 1;
            }
            return fail("expected a binary 0/1 value");
        }
        case AttributeKind::Numeric: {
            if (!raw.is_number()) return fail("expected a number");
            return raw.get<double>();
        }
        case AttributeKind::Coordinate: {
            if (!raw.is_array() || raw.size() != 2 || !raw[0].is_number() ||
                !raw[1].is_number()) {
                return fail("expected [lat, lon]");
            }
            return CoordinateValue{raw[0].get<double>(), raw[1].get<double>()};
        }
    }
    return std::monostate{};
}

inline nlohmann::json line_to_json(const std::string& line, std::size_t line_no,
                                   std::string_view what) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + " line " + std::to_string(line_no) + ": " +
                         e.what());
    }
}

}  // namespace detail

/// Loads a line-delimited item catalog. Each line is one record:
///
///   {"id": "t1", "type": "song", "attrs": {"tempo": 120, "terms": ["rock"]}}
///
/// `type` defaults to "item"; attributes absent from `attrs` (or null)
/// become Missing. Every record is validated against the schema.
inline Catalog load_catalog(std::istream& in, const Schema& schema) {
    schema.validate();
    Catalog catalog;
    catalog.schema = schema;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const nlohmann::json rec = detail::line_to_json(line, line_no, "catalog");
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
            throw ParseError("catalog line " + std::to_string(line_no) +
                             ": expected an object with a string 'id'");
        }
        Item item;
        item.id = rec["id"].get<std::string>();
        const std::string context = "catalog line " + std::to_string(line_no) +
                                    ", item '" + item.id + "'";
        if (rec.contains("type")) {
            if (!rec["type"].is_string()) {
                throw ParseError(context + ": 'type' must be a string");
            }
            item.type_id = rec["type"].get<std::string>();
        }
        item.values.assign(schema.size(), std::monostate{});
        if (rec.contains("attrs")) {
            if (!rec["attrs"].is_object()) {
                throw ParseError(context + ": 'attrs' must be an object");
            }
            for (auto it = rec["attrs"].begin(); it != rec["attrs"].end(); ++it) {
                const auto idx = schema.index_of(it.key());
                if (!idx) {
                    throw ValidationError(context + ": attribute '" + it.key() +
                                          "' not declared in schema");
                }
                item.values[*idx] = detail::parse_attribute_value(
                    it.value(), schema.attributes[*idx], context);
            }
        }
        validate_item(item, schema);
        if (!catalog.items.emplace(item.id, std::move(item)).second) {
            throw ValidationError(context + ": duplicate item id");
        }
    }
    return catalog;
}

inline Catalog load_catalog_file(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open catalog file: " + path);
    return load_catalog(in, schema);
}

/// Loads a line-delimited consultation log: {"user": "u", "ts": 123, "item": "t1"}.
/// Returns per-user streams sorted by timestamp ascending, input order
/// preserved on ties. Every item reference must resolve in the catalog.
inline UserLog load_log(std::istream& in, const Catalog& catalog) {
    UserLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const nlohmann::json rec = detail::line_to_json(line, line_no, "log");
        if (!rec.is_object() || !rec.contains("user") || !rec["user"].is_string() ||
            !rec.contains("item") || !rec["item"].is_string()) {
            throw ParseError("log line " + std::to_string(line_no) +
                             ": expected an object with string 'user' and 'item'");
        }
        if (!rec.contains("ts") || !rec["ts"].is_number_integer()) {
            throw ParseError("log line " + std::to_string(line_no) +
                             ": 'ts' must be integer epoch seconds");
        }
        Consultation c;
        c.user_id = rec["user"].get<std::string>();
        c.timestamp = rec["ts"].get<std::int64_t>();
        c.item_id = rec["item"].get<std::string>();
        if (catalog.items.find(c.item_id) == catalog.items.end()) {
            throw ReferenceError("log line " + std::to_string(line_no) +
                                 ": unknown item id '" + c.item_id + "'");
        }
        log[c.user_id].push_back(std::move(c));
    }
    for (auto& [user, stream] : log) {
        std::stable_sort(stream.begin(), stream.end(),
                         [](const Consultation& a, const Consultation& b) {
                             return a.timestamp < b.timestamp;
                         });
    }
    return log;
}

inline UserLog load_log_file(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open log file: " + path);
    return load_log(in, catalog);
}

/// Returns the schema with each numeric attribute's bounds replaced by the
/// extrema observed in the catalog. Streaming similarity needs the bounds
/// fixed up front; this is the one place they may be derived from data.
inline Schema derive_numeric_bounds(const Catalog& catalog) {
    if (catalog.items.empty()) {
        throw ArgumentError("derive_numeric_bounds: catalog is empty");
    }
    Schema schema = catalog.schema;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        AttributeSpec& spec = schema.attributes[i];
        if (spec.kind != AttributeKind::Numeric) continue;
        std::set<double> distinct;
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& [id, item] : catalog.items) {
            const AttributeValue& v = item.value_at(i);
            if (is_missing(v)) continue;
            const double x = std::get<double>(v);
            if (distinct.size() < 2) distinct.insert(x);
            if (!any) {
                lo = hi = x;
                any = true;
            } else {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
        if (!any || distinct.size() < 2) {
            throw DegenerateRangeError("attribute '" + spec.name +
                                       "': fewer than 2 distinct values in the corpus");
        }
        spec.numeric_bounds = NumericBounds{lo, hi};
    }
    return schema;
}

/// Summary statistics of one attribute over the catalog's non-Missing cells.
/// min/max/mean/stddev are engaged only for kinds with a scalar reading
/// (numeric and binary); an attribute with no values reports count 0 and
/// disengaged statistics rather than zeros.
struct AttributeStats {
    std::string name;
    AttributeKind kind = AttributeKind::SetValued;
    std::size_t count = 0;
    std::optional<double> min, max, mean, stddev;  // stddev is population sd
};

inline std::vector<AttributeStats> corpus_stats(const Catalog& catalog) {
    if (catalog.items.empty()) {
        throw ArgumentError("corpus_stats: catalog is empty");
    }
    std::vector<AttributeStats> rows;
    for (std::size_t i = 0; i < catalog.schema.size(); ++i) {
        const AttributeSpec& spec = catalog.schema.attributes[i];
        AttributeStats row;
        row.name = spec.name;
        row.kind = spec.kind;
        const bool scalar =
            spec.kind == AttributeKind::Numeric || spec.kind == AttributeKind::Binary;
        double sum = 0.0, sum_sq = 0.0, lo = 0.0, hi = 0.0;
        for (const auto& [id, item] : catalog.items) {
            const AttributeValue& v = item.value_at(i);
            if (is_missing(v)) continue;
            ++row.count;
            if (!scalar) continue;
            const double x = spec.kind == AttributeKind::Numeric
                                 ? std::get<double>(v)
                                 : (std::get<bool>(v) ? 1.0 : 0.0);
            if (row.count == 1) {
                lo = hi = x;
            } else {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            sum += x;
            sum_sq += x * x;
        }
        if (scalar && row.count > 0) {
            const double n = static_cast<double>(row.count);
            const double mean = sum / n;
            row.min = lo;
            row.max = hi;
            row.mean = mean;
            row.stddev = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Sets exactly floor(sparsity * non-missing cell count) uniformly chosen
/// attribute cells to Missing. Pure function of (catalog, sparsity, seed);
/// surviving cells are untouched.
inline Catalog degrade_catalog(const Catalog& catalog, double sparsity,
                               std::uint64_t seed) {
    if (!(sparsity >= 0.0 && sparsity <= 0.99)) {
        throw ArgumentError("degrade_catalog: sparsity must lie in [0, 0.99]");
    }
    Catalog result = catalog;
    std::vector<std::pair<Item*, std::size_t>> cells;
    for (auto& [id, item] : result.items) {
        for (std::size_t i = 0; i < item.values.size(); ++i) {
            if (!is_missing(item.values[i])) cells.emplace_back(&item, i);
        }
    }
    const std::size_t to_delete =
        static_cast<std::size_t>(std::floor(sparsity * static_cast<double>(cells.size())));
    SeededRng rng(seed);
    const std::size_t n = cells.size();
    for (std::size_t i = 0; i < to_delete; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(cells[i], cells[j]);
        cells[i].first->values[cells[i].second] = std::monostate{};
    }
    return result;
}

/// Partitions the catalog into `num_types` item types. Each type carries a
/// uniformly drawn subset of `attrs_per_type` attribute names, re-drawn as a
/// family (up to 10,000 attempts) until every pair of types shares at least
/// `min_common` names. Items are assigned types uniformly; attributes
/// outside an item's type become Missing. Pure function of (catalog,
/// parameters, seed).
inline Catalog split_types(const Catalog& catalog, std::size_t num_types,
                           std::size_t attrs_per_type, std::size_t min_common,
                           std::uint64_t seed) {
    const std::size_t h = catalog.schema.size();
    if (num_types < 1) throw ArgumentError("split_types: num_types must be >= 1");
    if (attrs_per_type < 1 || attrs_per_type > h) {
        throw ArgumentError("split_types: attrs_per_type must lie in [1, " +
                            std::to_string(h) + "]");
    }
    if (min_common > attrs_per_type) {
        throw ArgumentError("split_types: min_common cannot exceed attrs_per_type");
    }

    SeededRng rng(seed);
    Catalog result = catalog;

    std::vector<std::size_t> type_of;
    type_of.reserve(result.items.size());
    for (std::size_t i = 0; i < result.items.size(); ++i) {
        type_of.push_back(rng.index(num_types));
    }

    constexpr std::size_t kMaxFamilyDraws = 10000;
    std::vector<std::vector<bool>> keep;  // per type, mask over attribute indices
    for (std::size_t attempt = 0;; ++attempt) {
        if (attempt >= kMaxFamilyDraws) {
            throw InfeasibleSplitError(
                "split_types: no subset family found within " +
                std::to_string(kMaxFamilyDraws) + " draws (T=" + std::to_string(num_types) +
                ", x=" + std::to_string(attrs_per_type) + ", y=" +
                std::to_string(min_common) + ", h=" + std::to_string(h) + ")");
        }
        keep.clear();
        bool ok = true;
        for (std::size_t t = 0; t < num_types && ok; ++t) {
            const auto chosen = rng.sample_indices(h, attrs_per_type);
            std::vector<bool> mask(h, false);
            for (std::size_t a : chosen) mask[a] = true;
            for (const auto& prev : keep) {
                std::size_t common = 0;
                for (std::size_t a = 0; a < h; ++a) {
                    if (mask[a] && prev[a]) ++common;
                }
                if (common < min_common) {
                    ok = false;
                    break;
                }
            }
            if (ok) keep.push_back(std::move(mask));
        }
        if (ok) break;
    }

    std::size_t item_index = 0;
    for (auto& [id, item] : result.items) {
        const std::size_t t = type_of[item_index++];
        item.type_id = "type" + std::to_string(t);
        for (std::size_t a = 0; a < h; ++a) {
            if (!keep[t][a]) item.values[a] = std::monostate{};
        }
    }
    return result;
}

}  // namespace reldiv
