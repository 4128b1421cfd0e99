#pragma once

// RunConfig: one structured text file drives every subcommand. YAML keys:
//
//   dim: 3
//   metric: { kind: ratio3, A: 1 }          # euclidean | pseudo | ratio3
//                                           # | spacetime4 | expr
//   rng_seed: 42
//   trials: 100
//   tolerances: { class_tol: 1e-9, ortho_tol: 1e-8,
//                 singular_tol: 1e-10, rank_tol: 1e-7 }
//   seed_basis: [[...], ...]                # optional n x n
//   seed_plus:  [[...], ...]                # optional p x n (cone)
//   point:      [...]                       # optional (derive)
//   direction:  [...]                       # optional 3-vector (lightspeed)

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <yaml-cpp/yaml.h>

#include "finsler/core.hpp"
#include "finsler/error.hpp"
#include "finsler/norm.hpp"

namespace finsler {

struct MetricSpec {
    std::string kind;  // euclidean | pseudo | ratio3 | spacetime4 | expr
    int p = 0, q = 0;
    double A = 1.0;
    double c = 1.0;
    std::string text;
};

struct RunConfig {
    int dim = 0;
    MetricSpec metric;
    std::uint64_t rng_seed = 0;
    int trials = 100;
    Tolerances tol;
    std::optional<Eigen::MatrixXd> seed_basis;
    std::optional<Eigen::MatrixXd> seed_plus;
    std::optional<Eigen::VectorXd> point;
    std::optional<Eigen::VectorXd> direction;
};

namespace detail {

inline Eigen::MatrixXd yaml_matrix(const YAML::Node& node, const char* name) {
    if (!node.IsSequence() || node.size() == 0 || !node[0].IsSequence())
        throw Error(ErrorCode::ConfigError, std::string(name) + " must be a list of rows");
    const int rows = static_cast<int>(node.size());
    const int cols = static_cast<int>(node[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(node[r].size()) != cols)
            throw Error(ErrorCode::ConfigError, std::string(name) + " rows have unequal length");
        for (int c = 0; c < cols; ++c) m(r, c) = node[r][c].as<double>();
    }
    return m;
}

inline Eigen::VectorXd yaml_vector(const YAML::Node& node, const char* name) {
    if (!node.IsSequence() || node.size() == 0)
        throw Error(ErrorCode::ConfigError, std::string(name) + " must be a list of numbers");
    Eigen::VectorXd v(static_cast<int>(node.size()));
    for (int i = 0; i < static_cast<int>(node.size()); ++i) v[i] = node[i].as<double>();
    return v;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw Error(ErrorCode::ConfigError, "config root must be a mapping");

    RunConfig cfg;
    try {
        if (!root["dim"]) throw Error(ErrorCode::ConfigError, "missing required key: dim");
        cfg.dim = root["dim"].as<int>();
        if (!root["metric"] || !root["metric"].IsMap())
            throw Error(ErrorCode::ConfigError, "missing required mapping: metric");
        const YAML::Node m = root["metric"];
        if (!m["kind"]) throw Error(ErrorCode::ConfigError, "metric.kind is required");
        cfg.metric.kind = m["kind"].as<std::string>();
        if (m["p"]) cfg.metric.p = m["p"].as<int>();
        if (m["q"]) cfg.metric.q = m["q"].as<int>();
        if (m["A"]) cfg.metric.A = m["A"].as<double>();
        if (m["c"]) cfg.metric.c = m["c"].as<double>();
        if (m["text"]) cfg.metric.text = m["text"].as<std::string>();

        if (root["rng_seed"]) cfg.rng_seed = root["rng_seed"].as<std::uint64_t>();
        if (root["trials"]) cfg.trials = root["trials"].as<int>();
        if (const YAML::Node t = root["tolerances"]) {
            if (t["class_tol"]) cfg.tol.class_tol = t["class_tol"].as<double>();
            if (t["ortho_tol"]) cfg.tol.ortho_tol = t["ortho_tol"].as<double>();
            if (t["singular_tol"]) cfg.tol.singular_tol = t["singular_tol"].as<double>();
            if (t["rank_tol"]) cfg.tol.rank_tol = t["rank_tol"].as<double>();
        }
        if (root["seed_basis"]) cfg.seed_basis = detail::yaml_matrix(root["seed_basis"], "seed_basis");
        if (root["seed_plus"]) cfg.seed_plus = detail::yaml_matrix(root["seed_plus"], "seed_plus");
        if (root["point"]) cfg.point = detail::yaml_vector(root["point"], "point");
        if (root["direction"]) cfg.direction = detail::yaml_vector(root["direction"], "direction");
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config value error: ") + e.what());
    }
    return cfg;
}

inline void validate_config(const RunConfig& cfg) {
    if (cfg.dim < 1 || cfg.dim > 9)
        throw Error(ErrorCode::ConfigError, "dim must be in [1, 9]")
            .with("dim", static_cast<double>(cfg.dim));
    if (cfg.trials < 1)
        throw Error(ErrorCode::ConfigError, "trials must be positive");
    if (cfg.tol.class_tol <= 0 || cfg.tol.ortho_tol <= 0 || cfg.tol.singular_tol <= 0 ||
        cfg.tol.rank_tol <= 0)
        throw Error(ErrorCode::ConfigError, "tolerances must be positive");

    const std::string& k = cfg.metric.kind;
    if (k == "euclidean") {
    } else if (k == "pseudo") {
        if (cfg.metric.p < 0 || cfg.metric.q < 0 || cfg.metric.p + cfg.metric.q != cfg.dim)
            throw Error(ErrorCode::ConfigError, "pseudo requires p + q == dim with p, q >= 0");
    } else if (k == "ratio3") {
        if (cfg.dim != 3) throw Error(ErrorCode::ConfigError, "ratio3 requires dim == 3");
    } else if (k == "spacetime4") {
        if (cfg.dim != 4) throw Error(ErrorCode::ConfigError, "spacetime4 requires dim == 4");
        if (cfg.metric.c <= 0) throw Error(ErrorCode::ConfigError, "spacetime4 requires c > 0");
    } else if (k == "expr") {
        if (cfg.metric.text.empty())
            throw Error(ErrorCode::ConfigError, "metric.text is required for kind expr");
    } else {
        throw Error(ErrorCode::ConfigError, "unknown metric.kind: " + k);
    }

    if (cfg.seed_basis) {
        if (cfg.seed_basis->rows() != cfg.dim || cfg.seed_basis->cols() != cfg.dim)
            throw Error(ErrorCode::ConfigError, "seed_basis must be dim x dim");
        if (std::abs(cfg.seed_basis->determinant()) <= 1e-12)
            throw Error(ErrorCode::ConfigError, "seed_basis must be invertible")
                .with("det", cfg.seed_basis->determinant());
    }
    if (cfg.seed_plus && cfg.seed_plus->cols() != cfg.dim)
        throw Error(ErrorCode::ConfigError, "seed_plus rows must have dim entries");
    if (cfg.point && cfg.point->size() != cfg.dim)
        throw Error(ErrorCode::ConfigError, "point must have dim entries");
    if (cfg.direction && cfg.direction->size() != 3)
        throw Error(ErrorCode::ConfigError, "direction must have 3 entries");
}

inline FinslerNorm make_norm(const RunConfig& cfg) {
    const std::string& k = cfg.metric.kind;
    if (k == "euclidean") return euclidean(cfg.dim);
    if (k == "pseudo") return pseudo(cfg.metric.p, cfg.metric.q);
    if (k == "ratio3") return ratio3(cfg.metric.A);
    if (k == "spacetime4") return spacetime4(cfg.metric.c, cfg.metric.A);
    return parse_metric(cfg.metric.text, cfg.dim, cfg.rng_seed);
}

}  // namespace finsler
