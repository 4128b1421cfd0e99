#pragma once

// Orthogonalization under the asymmetric relation: vector w is orthogonal TO
// vector u when g(u)(u, w) = 0, with the metric evaluated at the earlier
// vector. Building e_{m+1} = e'_{m+1} + sum a^i e_i against the constraints
// <e_i, e_{m+1}>_{e_i} = 0 gives a lower-triangular system (earlier
// constraints vanish by construction), solved by forward substitution. Each
// accepted vector is normalized immediately so later diagonal entries are +-1.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "finsler/basis.hpp"
#include "finsler/core.hpp"
#include "finsler/error.hpp"
#include "finsler/linalg.hpp"
#include "finsler/norm.hpp"
#include "finsler/transform.hpp"

namespace finsler {

// T[k][l] = g_kl(e_k) in basis coordinates. A row can be undefined when the
// metric has no derivatives at e_k (e.g. the timelike axis of a direct-sum
// norm whose spatial part is only continuous at 0); the diagonal is then
// still reported through F^2(e_k), which is what unit length means.
struct TriTable {
    Eigen::MatrixXd t;
    std::vector<bool> row_defined;
};

struct TriAssessment {
    double max_upper_violation = 0.0;
    std::vector<int> diag_signs;  // +1 / -1, or 0 when not a unit diagonal
    bool orthonormal = false;
};

inline TriAssessment assess_tri(const TriTable& tri, double ortho_tol) {
    const int k = static_cast<int>(tri.t.rows());
    TriAssessment a;
    a.diag_signs.resize(static_cast<std::size_t>(k), 0);
    bool ok = true;
    for (int i = 0; i < k; ++i) {
        double d = tri.t(i, i);
        if (std::abs(std::abs(d) - 1.0) <= ortho_tol)
            a.diag_signs[static_cast<std::size_t>(i)] = d > 0 ? 1 : -1;
        else
            ok = false;
        for (int j = i + 1; j < k; ++j) {
            if (!tri.row_defined[static_cast<std::size_t>(i)]) {
                // constrained entries exist but cannot be evaluated
                a.max_upper_violation = std::numeric_limits<double>::infinity();
                ok = false;
                break;
            }
            a.max_upper_violation = std::max(a.max_upper_violation, std::abs(tri.t(i, j)));
        }
    }
    if (a.max_upper_violation > ortho_tol) ok = false;
    a.orthonormal = ok;
    return a;
}

// Direct route: T[k][l] = <e_k, e_l>_{e_k} evaluated with the ambient metric.
inline TriTable scalar_product_table(const FinslerNorm& norm, const Basis& basis) {
    const int k = basis.count();
    TriTable tri;
    tri.t = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
    tri.row_defined.assign(static_cast<std::size_t>(k), true);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd ei = basis.vector(i);
        try {
            Jet3 j = jet_eval(norm, ei, 2);
            Eigen::VectorXd functional = 0.5 * (j.hess * ei);  // g(e_i) e_i
            for (int l = 0; l < k; ++l) tri.t(i, l) = functional.dot(basis.vector(l));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::NonSmoothError)
                throw;
            tri.row_defined[static_cast<std::size_t>(i)] = false;
            tri.t(i, i) = eval_f2(norm, ei);
        }
    }
    return tri;
}

struct OrthoReport {
    Basis basis;
    Eigen::MatrixXd tri;
    std::vector<bool> row_defined;
    double max_upper_violation = 0.0;
    std::vector<int> diag_signs;
    bool orthonormal = false;
};

namespace detail {

inline OrthoReport finish_report(Basis basis, TriTable tri, double ortho_tol) {
    TriAssessment a = assess_tri(tri, ortho_tol);
    OrthoReport rep;
    rep.basis = std::move(basis);
    rep.tri = std::move(tri.t);
    rep.row_defined = std::move(tri.row_defined);
    rep.max_upper_violation = a.max_upper_violation;
    rep.diag_signs = std::move(a.diag_signs);
    rep.orthonormal = a.orthonormal;
    return rep;
}

}  // namespace detail

inline OrthoReport orthogonalize(const FinslerNorm& norm, const Basis& seed,
                                 const Tolerances& tol = {}) {
    const int n = norm.dim();
    const int count = seed.count();
    if (seed.dim() != n)
        throw Error(ErrorCode::ConfigError, "seed basis dimension does not match the norm");
    if (count < 1 || count > n)
        throw Error(ErrorCode::ConfigError, "seed basis must have between 1 and n vectors");

    Eigen::MatrixXd out(count, n);
    // Constraint functionals f_i = g(e_i) e_i and the lower-triangular system
    // entries L(i, p) = <e_i, e_p>_{e_i}. A row with no metric derivatives is
    // tolerable only when no later step needs its constraint.
    std::vector<std::optional<Eigen::VectorXd>> functionals(static_cast<std::size_t>(count));
    std::vector<std::optional<Error>> row_errors(static_cast<std::size_t>(count));
    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(count, count);

    for (int m = 0; m < count; ++m) {
        Eigen::VectorXd w = seed.vector(m);
        // forward substitution for the combination coefficients
        Eigen::VectorXd coeff(m);
        for (int i = 0; i < m; ++i) {
            if (!functionals[static_cast<std::size_t>(i)])
                throw row_errors[static_cast<std::size_t>(i)].value();
            double rhs = -functionals[static_cast<std::size_t>(i)]->dot(w);
            for (int p = 0; p < i; ++p) rhs -= lower(i, p) * coeff[p];
            double diag = lower(i, i);
            if (std::abs(diag) <= tol.class_tol)
                throw Error(ErrorCode::SingularSystem,
                            "vanishing diagonal in the orthogonalization system")
                    .with("step", static_cast<double>(i + 1))
                    .with("diag", diag);
            coeff[i] = rhs / diag;
        }
        Eigen::VectorXd e = w;
        for (int i = 0; i < m; ++i) e += coeff[i] * out.row(i).transpose();

        double f2 = eval_f2(norm, e);
        if (std::abs(f2) <= tol.class_tol)
            throw Error(ErrorCode::IsotropicIntermediate,
                        "orthogonalization produced an isotropic vector; the procedure "
                        "cannot be finished from this seed")
                .with("step", static_cast<double>(m + 1))
                .with("f2", f2)
                .with("vector", to_std(e));
        e /= std::sqrt(std::abs(f2));
        out.row(m) = e.transpose();

        try {
            Jet3 j = jet_eval(norm, e, 2);
            Eigen::MatrixXd g = 0.5 * j.hess;
            double det = g.determinant();
            if (std::abs(det) <= tol.singular_tol)
                throw Error(ErrorCode::SingularMetric, "metric singular along the run")
                    .with("det_g", det)
                    .with("v", to_std(e));
            functionals[static_cast<std::size_t>(m)] = g * e;
            for (int p = 0; p <= m; ++p)
                lower(m, p) = functionals[static_cast<std::size_t>(m)]->dot(out.row(p).transpose());
        } catch (const Error& err) {
            if (err.code() != ErrorCode::DomainError && err.code() != ErrorCode::NonSmoothError)
                throw;
            row_errors[static_cast<std::size_t>(m)] = err;
            lower(m, m) = eval_f2(norm, e);
        }
    }

    TriTable tri;
    tri.t = Eigen::MatrixXd::Constant(count, count, std::numeric_limits<double>::quiet_NaN());
    tri.row_defined.assign(static_cast<std::size_t>(count), true);
    for (int i = 0; i < count; ++i) {
        if (functionals[static_cast<std::size_t>(i)]) {
            for (int l = 0; l < count; ++l)
                tri.t(i, l) = functionals[static_cast<std::size_t>(i)]->dot(out.row(l).transpose());
        } else {
            tri.row_defined[static_cast<std::size_t>(i)] = false;
            tri.t(i, i) = lower(i, i);
        }
    }
    return detail::finish_report(Basis(std::move(out)), std::move(tri), tol.ortho_tol);
}

// Tensor-law route: express the metric in basis coordinates via the passive
// transform and read row k at the k-th coordinate unit vector.
inline OrthoReport triangular_report(const FinslerNorm& norm, const Basis& basis,
                                     const Tolerances& tol = {}) {
    if (!basis.square())
        throw Error(ErrorCode::ConfigError, "triangular_report requires a full basis");
    const int n = basis.count();
    FinslerNorm pulled = passive_transform(norm, basis.matrix().transpose());

    TriTable tri;
    tri.t = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    tri.row_defined.assign(static_cast<std::size_t>(n), true);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
        unit[k] = 1.0;
        try {
            Jet3 j = jet_eval(pulled, unit, 2);
            tri.t.row(k) = 0.5 * j.hess.row(k);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::NonSmoothError)
                throw;
            tri.row_defined[static_cast<std::size_t>(k)] = false;
            tri.t(k, k) = eval_f2(pulled, unit);
        }
    }
    return detail::finish_report(basis, std::move(tri), tol.ortho_tol);
}

// Reorder an orthonormal basis to the canonical sign pattern (spacelike
// vectors first). Reordering is only valid when the reordered tuple is still
// orthonormal -- guaranteed for quadratic forms, re-verified here for the
// general case.
inline std::optional<OrthoReport> sign_sorted_orthonormal(const FinslerNorm& norm,
                                                          const OrthoReport& rep,
                                                          const Tolerances& tol = {}) {
    if (!rep.orthonormal) return std::nullopt;
    const int n = rep.basis.count();
    Eigen::MatrixXd sorted(n, rep.basis.dim());
    int out = 0;
    for (int k = 0; k < n; ++k)
        if (rep.diag_signs[static_cast<std::size_t>(k)] == 1)
            sorted.row(out++) = rep.basis.matrix().row(k);
    for (int k = 0; k < n; ++k)
        if (rep.diag_signs[static_cast<std::size_t>(k)] != 1)
            sorted.row(out++) = rep.basis.matrix().row(k);
    OrthoReport res = triangular_report(norm, Basis(std::move(sorted)), tol);
    if (!res.orthonormal) return std::nullopt;
    return res;
}

// ---------------------------------------------------------------------------
// V+ / V- split for indefinite norms. The caller supplies a spacelike seed
// subspace; its orthogonal complement (null space of w -> <e+_k, w>_{e+_k})
// must consist of timelike vectors for the construction to succeed.

struct ConeSplit {
    OrthoReport plus;
    OrthoReport minus;
    Basis combined;
    OrthoReport combined_report;
};

inline ConeSplit cone_split(const FinslerNorm& norm, const Basis& seed_plus,
                            const Tolerances& tol = {}) {
    const int n = norm.dim();
    const int p = seed_plus.count();
    if (p < 1 || p >= n)
        throw Error(ErrorCode::ConfigError, "spacelike seed must have 1..n-1 vectors");
    for (int i = 0; i < p; ++i) {
        VectorClass c = classify(norm, seed_plus.vector(i), tol.class_tol);
        if (c.kind != VectorKind::Spacelike)
            throw Error(ErrorCode::NotSpacelikeSeed,
                        std::string("seed vector is ") + vector_kind_name(c.kind))
                .with("index", static_cast<double>(i))
                .with("f2", c.f2)
                .with("vector", to_std(seed_plus.vector(i)));
    }

    ConeSplit result;
    result.plus = orthogonalize(norm, seed_plus, tol);

    // functionals of the orthonormal spacelike set
    Eigen::MatrixXd rows(p, n);
    for (int k = 0; k < p; ++k) {
        Eigen::VectorXd ek = result.plus.basis.vector(k);
        MetricAt m = metric_at(norm, ek, tol.singular_tol);
        rows.row(k) = (m.g * ek).transpose();
    }
    NullSpaceResult ns = null_space(rows, tol.rank_tol);
    if (ns.rank != p || ns.basis.cols() != n - p)
        throw Error(ErrorCode::SingularSystem,
                    "orthogonal complement does not have the expected dimension")
            .with("rank", static_cast<double>(ns.rank));

    Basis perp_seed(Eigen::MatrixXd(ns.basis.transpose()));
    try {
        result.minus = orthogonalize(norm, perp_seed, tol);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IsotropicIntermediate) {
            Error perp(ErrorCode::PerpContainsIsotropic,
                       "the orthogonal complement of the spacelike subspace contains an "
                       "isotropic vector");
            for (const auto& [k, v] : e.scalar_witnesses()) perp.with(k, v);
            for (const auto& [k, v] : e.vector_witnesses()) perp.with(k, v);
            throw perp;
        }
        throw;
    }
    for (std::size_t k = 0; k < result.minus.diag_signs.size(); ++k) {
        if (result.minus.diag_signs[k] != -1)
            throw Error(ErrorCode::PerpContainsIsotropic,
                        "the orthogonal complement contains a non-timelike vector")
                .with("index", static_cast<double>(k))
                .with("vector", to_std(result.minus.basis.vector(static_cast<int>(k))));
    }

    Eigen::MatrixXd combined(n, n);
    combined.topRows(p) = result.plus.basis.matrix();
    combined.bottomRows(n - p) = result.minus.basis.matrix();
    result.combined = Basis(std::move(combined));
    result.combined_report = triangular_report(norm, result.combined, tol);
    return result;
}

}  // namespace finsler
