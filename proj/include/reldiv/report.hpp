// File: include/reldiv/report.hpp
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "reldiv/catalog.hpp"
#include "reldiv/diversity.hpp"
#include "reldiv/error.hpp"
#include "reldiv/evaluation.hpp"
#include "reldiv/synthetic.hpp"

namespace reldiv {

/// Shortest round-trip decimal rendering of a double; NaN prints as "NaN".
inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf, end);
}

/// Quotes a CSV field only when it needs it (comma, quote, or newline).
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

/// Writes `text` to `path` atomically: a sibling temp file is written,
/// flushed, and renamed over the target, so readers never observe a
/// partially written report.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("rename failed: " + tmp.string() + " -> " + path.string() + ": " +
                      ec.message());
    }
}

// ---------------------------------------------------------------------------
// CSV reports
// ---------------------------------------------------------------------------

inline std::string stats_csv(const std::vector<AttributeStats>& rows) {
    std::string out = "attribute,kind,count,min,max,mean,sd\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const AttributeStats& r : rows) {
        out += csv_field(r.name);
        out += ',';
        out += kind_name(r.kind);
        out += ',';
        out += std::to_string(r.count);
        out += ',';
        out += opt(r.min);
        out += ',';
        out += opt(r.max);
        out += ',';
        out += opt(r.mean);
        out += ',';
        out += opt(r.stddev);
        out += '\n';
    }
    return out;
}

inline std::string calibration_csv(const TauCalibration& c) {
    std::string out = "tau,mean,sd,samples\n";
    out += format_double(c.tau);
    out += ',';
    out += format_double(c.mean);
    out += ',';
    out += format_double(c.stddev);
    out += ',';
    out += std::to_string(c.samples);
    out += '\n';
    return out;
}

inline std::string h1_csv(const H1Report& r) {
    std::string out =
        "total_sessions,detected_sessions,session_rate,total_changes,non_session_changes\n";
    out += std::to_string(r.total_sessions);
    out += ',';
    out += std::to_string(r.detected_sessions);
    out += ',';
    out += format_double(r.session_rate);
    out += ',';
    out += std::to_string(r.total_changes);
    out += ',';
    out += std::to_string(r.non_session_changes);
    out += '\n';
    return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "sparsity,session_rate,total_changes,seed\n";
    for (const SweepRow& r : rows) {
        out += format_double(r.sparsity);
        out += ',';
        out += format_double(r.session_rate);
        out += ',';
        out += std::to_string(r.total_changes);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

inline std::string type_split_csv(const std::vector<TypeSplitRow>& rows) {
    std::string out = "x,y,runs,session_rate_avg,session_rate_sd,contexts_avg,contexts_sd\n";
    for (const TypeSplitRow& r : rows) {
        out += std::to_string(r.attrs_per_type);
        out += ',';
        out += std::to_string(r.min_common);
        out += ',';
        out += std::to_string(r.runs);
        out += ',';
        out += format_double(r.session_rate_avg);
        out += ',';
        out += format_double(r.session_rate_sd);
        out += ',';
        out += format_double(r.contexts_avg);
        out += ',';
        out += format_double(r.contexts_sd);
        out += '\n';
    }
    return out;
}

inline std::string ground_truth_csv(const GroundTruthReport& r) {
    std::string out =
        "boundaries,boundaries_hit,recall,recall_defined,changes,changes_matched,"
        "precision,precision_defined\n";
    out += std::to_string(r.boundaries_total);
    out += ',';
    out += std::to_string(r.boundaries_hit);
    out += ',';
    out += format_double(r.recall);
    out += ',';
    out += r.recall_defined ? "1" : "0";
    out += ',';
    out += std::to_string(r.changes_total);
    out += ',';
    out += std::to_string(r.changes_matched);
    out += ',';
    out += format_double(r.precision);
    out += ',';
    out += r.precision_defined ? "1" : "0";
    out += '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Line-delimited records
// ---------------------------------------------------------------------------

/// One record per consultation: {"user","index","ts","item","rd","s","change"}.
/// rd is a number, or the string "NaN" when not computable.
inline std::string trace_jsonl(const std::vector<Consultation>& stream,
                               const StreamResult& result) {
    if (stream.size() != result.points.size()) {
        throw ArgumentError("trace_jsonl: stream/result size mismatch");
    }
    std::vector<bool> changed(stream.size(), false);
    for (const ContextChange& c : result.changes) changed[c.index] = true;

    std::string out;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const DiversityPoint& p = result.points[i];
        nlohmann::ordered_json rec;
        rec["user"] = stream[i].user_id;
        rec["index"] = p.index;
        rec["ts"] = stream[i].timestamp;
        rec["item"] = stream[i].item_id;
        if (p.rd.computable()) {
            rec["rd"] = p.rd.get();
        } else {
            rec["rd"] = "NaN";
        }
        rec["s"] = p.computable_count;
        rec["change"] = static_cast<bool>(changed[i]);
        out += rec.dump();
        out += '\n';
    }
    return out;
}

/// One record per emitted change: {"user","index","ts","item","rd"}.
inline std::string changes_jsonl(const std::vector<Consultation>& stream,
                                 const std::vector<ContextChange>& changes) {
    std::string out;
    for (const ContextChange& c : changes) {
        nlohmann::ordered_json rec;
        rec["user"] = c.user_id;
        rec["index"] = c.index;
        if (c.index < stream.size()) rec["ts"] = stream[c.index].timestamp;
        rec["item"] = c.item_id;
        rec["rd"] = c.rd_value;
        out += rec.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus serialization (round-trips through the loaders)
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json value_to_json(const AttributeValue& value) {
    if (const auto* s = std::get_if<SetValue>(&value)) {
        return nlohmann::ordered_json(*s);
    }
    if (const auto* iv = std::get_if<IntervalValue>(&value)) {
        return nlohmann::ordered_json::array({iv->lo, iv->hi});
    }
    if (const auto* b = std::get_if<bool>(&value)) {
        return *b ? 1 : 0;
    }
    if (const auto* d = std::get_if<double>(&value)) {
        return *d;
    }
    if (const auto* c = std::get_if<CoordinateValue>(&value)) {
        return nlohmann::ordered_json::array({c->lat, c->lon});
    }
    throw ArgumentError("value_to_json: missing value has no representation");
}

}  // namespace detail

/// One {"id","type","attrs":{...}} record per item, in catalog order.
/// Missing values are simply omitted from "attrs".
inline std::string catalog_jsonl(const Catalog& catalog) {
    std::string out;
    for (const auto& [id, item] : catalog.items) {
        nlohmann::ordered_json rec;
        rec["id"] = id;
        rec["type"] = item.type_id;
        nlohmann::ordered_json attrs = nlohmann::ordered_json::object();
        for (std::size_t a = 0; a < catalog.schema.size(); ++a) {
            const AttributeValue& v = item.value_at(a);
            if (is_missing(v)) continue;
            attrs[catalog.schema.attributes[a].name] = detail::value_to_json(v);
        }
        rec["attrs"] = std::move(attrs);
        out += rec.dump();
        out += '\n';
    }
    return out;
}

/// One {"user","ts","item"} record per consultation, users in map order,
/// consultations in stream order.
inline std::string log_jsonl(const UserLog& log) {
    std::string out;
    for (const auto& [user, stream] : log) {
        for (const Consultation& c : stream) {
            nlohmann::ordered_json rec;
            rec["user"] = c.user_id;
            rec["ts"] = c.timestamp;
            rec["item"] = c.item_id;
            out += rec.dump();
            out += '\n';
        }
    }
    return out;
}

}  // namespace reldiv
