#pragma once

// Subcommand orchestration behind the CLI. Exit codes: 0 all checked
// invariants hold (a NotClosed closure verdict is a finding, not a failure);
// 1 a checked invariant is violated; 2 config or metric-text parse error;
// 3 numeric failure (singular metric, isotropic intermediate, ...).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

#include "finsler/config.hpp"
#include "finsler/core.hpp"
#include "finsler/fd.hpp"
#include "finsler/motions.hpp"
#include "finsler/norm.hpp"
#include "finsler/ortho.hpp"
#include "finsler/report.hpp"
#include "finsler/rng.hpp"

namespace finsler {

struct RunResult {
    Report report;
    int exit_code = 0;
};

namespace detail {

inline int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::SyntaxError:
        case ErrorCode::DimensionError:
        case ErrorCode::HomogeneityError:
        case ErrorCode::ConfigError:
            return 2;
        default:
            return 3;
    }
}

inline json json_ortho_report(const OrthoReport& rep) {
    json j;
    j["basis"] = json_matrix(rep.basis.matrix());
    j["tri"] = json_matrix(rep.tri);
    j["diag_signs"] = rep.diag_signs;
    j["max_upper_violation"] = rep.max_upper_violation;
    j["orthonormal"] = rep.orthonormal;
    return j;
}

inline json json_tensor3(const SymTensor3& t) {
    const int n = t.dim();
    json entries = json::array();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k)
                entries.push_back(json{{"i", i}, {"j", j}, {"k", k}, {"value", t(i, j, k)}});
    return entries;
}

inline void run_check(const RunConfig& cfg, const FinslerNorm& norm, Report& rep, int& exit_code) {
    SplitMix64 rng = SplitMix64(cfg.rng_seed).split(/*tag=*/0x434845434BULL);  // "CHECK"
    EulerReport worst_euler;
    DiscrepancyReport worst_fd;
    int evaluated = 0, skipped = 0;
    while (evaluated < cfg.trials && skipped < 16 * cfg.trials) {
        Eigen::VectorXd v = rng.nonzero_vector(cfg.dim, -2.0, 2.0);
        if (!fd_stencil_valid(norm, v)) {
            ++skipped;
            continue;
        }
        try {
            EulerReport er = euler_report(norm, v);
            DiscrepancyReport fr = fd_check(norm, v);
            worst_euler.euler_f2 = std::max(worst_euler.euler_f2, er.euler_f2);
            worst_euler.contraction = std::max(worst_euler.contraction, er.contraction);
            worst_euler.metric_homogeneity =
                std::max(worst_euler.metric_homogeneity, er.metric_homogeneity);
            worst_euler.grad_identity = std::max(worst_euler.grad_identity, er.grad_identity);
            worst_fd.grad_rel = std::max(worst_fd.grad_rel, fr.grad_rel);
            worst_fd.hess_rel = std::max(worst_fd.hess_rel, fr.hess_rel);
            worst_fd.third_rel = std::max(worst_fd.third_rel, fr.third_rel);
            ++evaluated;
        } catch (const Error&) {
            ++skipped;  // non-smooth or out-of-domain sample
        }
    }
    bool euler_ok = worst_euler.max_residual() <= 1e-8;
    bool fd_ok = worst_fd.grad_rel <= 1e-5 && worst_fd.hess_rel <= 1e-5 &&
                 worst_fd.third_rel <= 1e-3;
    json& out = rep.outputs();
    out["points"] = evaluated;
    out["skipped"] = skipped;
    out["max_euler"] = json{{"euler_f2", worst_euler.euler_f2},
                            {"contraction", worst_euler.contraction},
                            {"metric_homogeneity", worst_euler.metric_homogeneity},
                            {"grad_identity", worst_euler.grad_identity}};
    out["max_fd"] = json{{"grad", worst_fd.grad_rel},
                         {"hess", worst_fd.hess_rel},
                         {"third", worst_fd.third_rel}};
    out["euler_pass"] = euler_ok;
    out["fd_pass"] = fd_ok;
    if (!euler_ok || !fd_ok) {
        rep.set_status("invariant_violated");
        exit_code = 1;
    }
}

inline void run_gram(const RunConfig& cfg, const FinslerNorm& norm, Report& rep, int& exit_code) {
    Basis seed = cfg.seed_basis ? Basis(*cfg.seed_basis) : Basis::standard(cfg.dim);
    OrthoReport ortho = orthogonalize(norm, seed, cfg.tol);
    OrthoReport recheck = triangular_report(norm, ortho.basis, cfg.tol);
    json& out = rep.outputs();
    out["seed"] = json_matrix(seed.matrix());
    out["orthogonalize"] = json_ortho_report(ortho);
    out["triangular_recheck"] = json_ortho_report(recheck);
    if (!ortho.orthonormal || !recheck.orthonormal) {
        rep.set_status("invariant_violated");
        exit_code = 1;
    }
}

inline void run_cone(const RunConfig& cfg, const FinslerNorm& norm, Report& rep, int& exit_code) {
    if (!cfg.seed_plus)
        throw Error(ErrorCode::ConfigError, "cone requires seed_plus in the config");
    ConeSplit split = cone_split(norm, Basis(*cfg.seed_plus), cfg.tol);
    json& out = rep.outputs();
    out["plus"] = json_ortho_report(split.plus);
    out["minus"] = json_ortho_report(split.minus);
    out["combined"] = json_ortho_report(split.combined_report);
    if (!split.combined_report.orthonormal) {
        rep.set_status("invariant_violated");
        exit_code = 1;
    }
}

inline void run_probe_closure(const RunConfig& cfg, const FinslerNorm& norm, Report& rep,
                              int& /*exit_code*/) {
    ClosureSearch search = closure_search(norm, cfg.rng_seed, cfg.trials, cfg.tol);
    json& out = rep.outputs();
    out["trials"] = search.trials;
    out["pairs_tested"] = search.pairs_tested;
    out["skipped"] = search.skipped;
    out["closed"] = search.closed;
    out["not_closed"] = search.not_closed;
    out["max_violation"] = search.max_violation;
    out["verdict"] = search.not_closed > 0 ? "NotClosed" : "Closed";
    if (search.first_not_closed) {
        const ClosureProbeResult& w = *search.first_not_closed;
        json witness;
        witness["trial"] = search.first_not_closed_trial;
        witness["violation"] = w.violation;
        witness["motion"] = json_matrix(w.motion.matrix);
        witness["basis_1"] = json_matrix(w.motion.source.matrix());
        witness["basis_2"] = json_matrix(w.motion.image.matrix());
        witness["chained"] = json_matrix(w.chained.matrix());
        witness["digest"] = content_digest(canonical_dump(witness));
        out["first_not_closed"] = witness;
    }
    // NotClosed is the expected finding for direction-dependent norms, not a
    // fault: the verdict is data and the exit code stays 0.
}

inline void run_lie(const RunConfig& cfg, const FinslerNorm& norm, Report& rep, int& exit_code) {
    Basis seed = cfg.seed_basis ? Basis(*cfg.seed_basis) : Basis::standard(cfg.dim);
    OrthoReport ortho = orthogonalize(norm, seed, cfg.tol);
    InfinitesimalSpace space = infinitesimal_space(norm, ortho.basis, cfg.tol);

    constexpr double kSmallnessK = 50.0;
    const double eps_values[] = {1e-4, 1e-5, 1e-6};
    double worst_ratio = 0.0;
    for (const Eigen::MatrixXd& a : space.generators)
        for (double eps : eps_values) {
            double defect = orthonormality_defect(norm, space.at, a, eps);
            worst_ratio = std::max(worst_ratio, defect / (eps * eps));
        }
    bool smallness_ok = worst_ratio <= kSmallnessK;

    SplitMix64 rng = SplitMix64(cfg.rng_seed).split(/*tag=*/0x4C4945ULL);  // "LIE"
    double max_rate = 0.0;
    json witness = json::object();
    for (std::size_t gi = 0; gi < space.generators.size(); ++gi)
        for (int t = 0; t < cfg.trials; ++t) {
            Eigen::VectorXd x = rng.nonzero_vector(cfg.dim, -1.0, 1.0);
            Eigen::VectorXd y = rng.nonzero_vector(cfg.dim, -1.0, 1.0);
            try {
                double rate = scalar_defect_rate(norm, space.generators[gi], x, y, 1e-4,
                                                 cfg.tol.singular_tol);
                if (std::abs(rate) > max_rate) {
                    max_rate = std::abs(rate);
                    witness = json{{"generator", gi},
                                   {"x", json_vector(x)},
                                   {"y", json_vector(y)},
                                   {"rate", rate}};
                }
            } catch (const Error&) {
                // sample hit a singular or non-smooth direction; skip
            }
        }

    json& out = rep.outputs();
    out["basis"] = json_matrix(space.at.matrix());
    out["dim"] = space.dim;
    json gens = json::array();
    for (const Eigen::MatrixXd& a : space.generators) gens.push_back(json_matrix(a));
    out["generators"] = gens;
    out["smallness_max_ratio"] = worst_ratio;
    out["smallness_pass"] = smallness_ok;
    out["max_defect_rate"] = max_rate;
    out["defect_witness"] = witness;
    if (!smallness_ok) {
        rep.set_status("invariant_violated");
        exit_code = 1;
    }
}

inline void run_lightspeed(const RunConfig& cfg, const FinslerNorm& norm, Report& rep,
                           int& exit_code) {
    Eigen::VectorXd d = cfg.direction ? *cfg.direction
                                      : Eigen::VectorXd(Eigen::Vector3d(1.0, 0.0, 0.0));
    SpeedReport speed =
        light_speed(norm, cfg.metric.c, d, cfg.trials, cfg.rng_seed, cfg.tol.class_tol);
    bool constant = speed.spread() <= 1e-12;
    json& out = rep.outputs();
    out["c"] = speed.c;
    out["direction"] = json_vector(d);
    out["v0_at_direction"] = speed.v0_at_direction;
    out["trials"] = speed.trials;
    out["v0_min"] = speed.v0_min;
    out["v0_max"] = speed.v0_max;
    out["v0_mean"] = speed.v0_mean;
    out["spread"] = speed.spread();
    out["constancy_pass"] = constant;
    if (!constant) {
        rep.set_status("invariant_violated");
        exit_code = 1;
    }
}

inline void run_derive(const RunConfig& cfg, const FinslerNorm& norm, Report& rep,
                       int& exit_code) {
    if (!cfg.point) throw Error(ErrorCode::ConfigError, "derive requires point in the config");
    const Eigen::VectorXd& v = *cfg.point;
    MetricAt m = metric_at(norm, v, cfg.tol.singular_tol);
    CartanAt c = cartan_at(norm, v);
    EulerReport er = euler_report(norm, v);
    json& out = rep.outputs();
    out["point"] = json_vector(v);
    out["f2"] = eval_f2(norm, v);
    out["classification"] = vector_kind_name(classify(norm, v, cfg.tol.class_tol).kind);
    out["g"] = json_matrix(m.g);
    out["det_g"] = m.det_g;
    out["cartan"] = json_tensor3(c.c);
    out["euler"] = json{{"euler_f2", er.euler_f2},
                        {"contraction", er.contraction},
                        {"metric_homogeneity", er.metric_homogeneity},
                        {"grad_identity", er.grad_identity}};
    if (er.max_residual() > 1e-8) {
        rep.set_status("invariant_violated");
        exit_code = 1;
    }
}

}  // namespace detail

inline RunResult run(const std::string& command, const std::string& config_text,
                     std::optional<std::uint64_t> seed_override = std::nullopt) {
    RunConfig cfg;
    try {
        cfg = parse_config(config_text);
        if (seed_override) cfg.rng_seed = *seed_override;
        validate_config(cfg);
    } catch (const Error& e) {
        RunResult res{Report(command, config_text, seed_override.value_or(0)), 2};
        res.report.add_diagnostic(e);
        res.report.set_status("config_error");
        return res;
    }

    RunResult res{Report(command, config_text, cfg.rng_seed), 0};
    try {
        FinslerNorm norm = make_norm(cfg);
        if (command == "check") detail::run_check(cfg, norm, res.report, res.exit_code);
        else if (command == "gram") detail::run_gram(cfg, norm, res.report, res.exit_code);
        else if (command == "cone") detail::run_cone(cfg, norm, res.report, res.exit_code);
        else if (command == "probe-closure")
            detail::run_probe_closure(cfg, norm, res.report, res.exit_code);
        else if (command == "lie") detail::run_lie(cfg, norm, res.report, res.exit_code);
        else if (command == "lightspeed")
            detail::run_lightspeed(cfg, norm, res.report, res.exit_code);
        else if (command == "derive") detail::run_derive(cfg, norm, res.report, res.exit_code);
        else
            throw Error(ErrorCode::ConfigError, "unknown subcommand: " + command);
    } catch (const Error& e) {
        res.exit_code = detail::exit_code_for(e);
        res.report.add_diagnostic(e);
        res.report.set_status(res.exit_code == 2 ? "config_error" : "numeric_error");
    }
    return res;
}

}  // namespace finsler
