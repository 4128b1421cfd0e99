#pragma once

// Machine-readable reports. Canonical form: JSON with keys sorted (the
// default object ordering), floats rendered with 17 significant digits, no
// timestamps or environment echoes, so identical (config, rng_seed) produce
// byte-identical bytes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "finsler/error.hpp"

namespace finsler {

using json = nlohmann::json;

inline json json_vector(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json json_matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline json json_diagnostic(const Error& e) {
    json witness = json::object();
    for (const auto& [name, value] : e.scalar_witnesses()) witness[name] = value;
    for (const auto& [name, value] : e.vector_witnesses()) witness[name] = value;
    return json{{"code", error_code_name(e.code())},
                {"message", e.what()},
                {"witness", witness}};
}

// FNV-1a over the raw config bytes; enough to tie a report to its inputs.
inline std::string content_digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline void dump_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // keys already sorted
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ',';
                first = false;
                dump_canonical(el, out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double d = j.get<double>();
            if (!std::isfinite(d)) {  // JSON has no NaN/Inf
                out += "null";
                break;
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

// Canonical serialization: sorted keys, 17-significant-digit floats, NaN as
// null, newline-terminated.
inline std::string canonical_dump(const json& j) {
    std::string out;
    detail::dump_canonical(j, out);
    out += '\n';
    return out;
}

struct Report {
    json body = json::object();

    Report(const std::string& command, const std::string& config_text, std::uint64_t rng_seed) {
        body["schema_version"] = "1";
        body["command"] = command;
        body["config_digest"] = content_digest(config_text);
        body["rng_seed"] = rng_seed;
        body["outputs"] = json::object();
        body["diagnostics"] = json::array();
        body["status"] = "ok";
    }

    void add_diagnostic(const Error& e) { body["diagnostics"].push_back(json_diagnostic(e)); }
    void set_status(const std::string& s) { body["status"] = s; }
    json& outputs() { return body["outputs"]; }

    std::string serialize() const { return canonical_dump(body); }
};

}  // namespace finsler
