#pragma once

// Motions between orthonormal bases and what is left of their group
// structure. A motion's matrix A is the coordinate form A * E1 = E2 on the
// row-matrices of basis coordinates; chaining A onto its own image asks
// whether the image of an orthonormal basis under "the same motion again"
// stays orthonormal, which is exactly where the direction-dependent case
// breaks. Passive transformations carry the same matrices; the active and
// passive orthonormality verdicts are computed through different routes
// (direct scalar products vs the pulled-back metric) and must coincide.

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "finsler/basis.hpp"
#include "finsler/core.hpp"
#include "finsler/error.hpp"
#include "finsler/linalg.hpp"
#include "finsler/norm.hpp"
#include "finsler/ortho.hpp"
#include "finsler/transform.hpp"

namespace finsler {

struct Motion {
    Eigen::MatrixXd matrix;  // A with A * source = image (row coordinates)
    Basis source;
    Basis image;
};

namespace detail {

inline void require_orthonormal(const FinslerNorm& norm, const Basis& b, const char* which,
                                const Tolerances& tol) {
    OrthoReport rep = triangular_report(norm, b, tol);
    if (!rep.orthonormal) {
        double diag_dev = 0.0;
        for (int i = 0; i < b.count(); ++i)
            diag_dev = std::max(diag_dev, std::abs(std::abs(rep.tri(i, i)) - 1.0));
        throw Error(ErrorCode::NotOrthonormal, std::string(which) + " basis is not orthonormal")
            .with("max_upper_violation", rep.max_upper_violation)
            .with("max_diag_deviation", diag_dev);
    }
}

}  // namespace detail

// The unique linear map sending b1 to b2, as the matrix A = E2 * E1^-1.
inline Motion motion_between(const FinslerNorm& norm, const Basis& b1, const Basis& b2,
                             const Tolerances& tol = {}) {
    detail::require_orthonormal(norm, b1, "source", tol);
    detail::require_orthonormal(norm, b2, "image", tol);
    // solve A * E1 = E2  <=>  E1^T A^T = E2^T
    Eigen::MatrixXd at = b1.matrix().transpose().partialPivLu().solve(b2.matrix().transpose());
    Motion m;
    m.matrix = at.transpose();
    m.source = b1;
    m.image = b2;
    return m;
}

enum class ClosureVerdict { Closed, NotClosed };

struct ClosureProbeResult {
    Motion motion;
    Basis chained;       // A applied to its own image
    double violation;    // orthonormality residual of the chained basis
    ClosureVerdict verdict;
};

inline ClosureProbeResult probe_closure(const FinslerNorm& norm, const Basis& b1,
                                        const Basis& b2, const Tolerances& tol = {}) {
    Motion m = motion_between(norm, b1, b2, tol);
    Basis b3(Eigen::MatrixXd(m.matrix * b2.matrix()));
    OrthoReport rep = triangular_report(norm, b3, tol);
    double violation = rep.max_upper_violation;
    for (int i = 0; i < b3.count(); ++i)
        violation = std::max(violation, std::abs(std::abs(rep.tri(i, i)) - 1.0));
    ClosureProbeResult res{std::move(m), std::move(b3), violation,
                           violation > tol.ortho_tol ? ClosureVerdict::NotClosed
                                                     : ClosureVerdict::Closed};
    return res;
}

// Active route: is the image of b under the matrix A orthonormal, judged by
// direct scalar products?
inline bool motion_preserves_orthonormality(const FinslerNorm& norm, const Eigen::MatrixXd& a,
                                            const Basis& b, const Tolerances& tol = {}) {
    Basis image(Eigen::MatrixXd(a * b.matrix()));
    TriTable tri = scalar_product_table(norm, image);
    return assess_tri(tri, tol.ortho_tol).orthonormal;
}

// Passive route: the basis with coordinates A relative to b, judged through
// the pulled-back metric evaluator. Coincides with the active verdict.
inline bool quasimotion_check(const FinslerNorm& norm, const Eigen::MatrixXd& a,
                              const Basis& b, const Tolerances& tol = {}) {
    detail::require_orthonormal(norm, b, "reference", tol);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw Error(ErrorCode::SingularTransform, "passive transformation is singular")
            .with("det", a.determinant());
    Basis image(Eigen::MatrixXd(a * b.matrix()));
    OrthoReport rep = triangular_report(norm, image, tol);
    return rep.orthonormal;
}

// ---------------------------------------------------------------------------
// Seeded closure search: orthogonalize random seed bases, bring them to the
// canonical sign pattern, and probe every pair with matching patterns.
// Matching patterns keep the quadratic-form case inside the classical group,
// where chaining provably stays orthonormal.

struct ClosureSearch {
    int trials = 0;
    int pairs_tested = 0;
    int skipped = 0;
    int closed = 0;
    int not_closed = 0;
    double max_violation = 0.0;
    int first_not_closed_trial = -1;
    std::optional<ClosureProbeResult> first_not_closed;
};

inline ClosureSearch closure_search(const FinslerNorm& norm, std::uint64_t rng_seed,
                                    int trials, const Tolerances& tol = {}) {
    SplitMix64 rng = SplitMix64(rng_seed).split(/*tag=*/0x50524F4245ULL);  // "PROBE"
    const int n = norm.dim();
    // Bases with huge coordinates (heavily boosted, near the cone) amplify
    // the chain's rounding past ortho_tol and would fake NotClosed verdicts
    // on metrics whose motions provably close; the search stays on a bounded
    // chunk of the basis manifold.
    constexpr double kMaxEntry = 6.0;
    ClosureSearch search;
    search.trials = trials;
    int attempts = 0;
    const int max_attempts = 64 * trials;
    while (search.pairs_tested < trials && attempts < max_attempts) {
        ++attempts;
        Eigen::MatrixXd m1 = rng.invertible_matrix(n);
        Eigen::MatrixXd m2 = rng.invertible_matrix(n);
        std::optional<OrthoReport> b1, b2;
        try {
            b1 = sign_sorted_orthonormal(norm, orthogonalize(norm, Basis(m1), tol), tol);
            b2 = sign_sorted_orthonormal(norm, orthogonalize(norm, Basis(m2), tol), tol);
        } catch (const Error&) {
            ++search.skipped;
            continue;
        }
        if (!b1 || !b2 || b1->diag_signs != b2->diag_signs ||
            b1->basis.matrix().cwiseAbs().maxCoeff() > kMaxEntry ||
            b2->basis.matrix().cwiseAbs().maxCoeff() > kMaxEntry) {
            ++search.skipped;
            continue;
        }
        ClosureProbeResult probe = probe_closure(norm, b1->basis, b2->basis, tol);
        int trial_index = search.pairs_tested;
        ++search.pairs_tested;
        search.max_violation = std::max(search.max_violation, probe.violation);
        if (probe.verdict == ClosureVerdict::NotClosed) {
            ++search.not_closed;
            if (!search.first_not_closed) {
                search.first_not_closed_trial = trial_index;
                search.first_not_closed = probe;
            }
        } else {
            ++search.closed;
        }
    }
    return search;
}

// ---------------------------------------------------------------------------
// Infinitesimal motions: first-order perturbations e_k -> (I + eps a) e_k
// preserving the constrained orthonormality residuals
//   phi_{kl} = <e_k, e_l>_{e_k} - target_{kl},  k <= l.
// The Jacobian of phi with respect to the n^2 entries of a is assembled from
// the metric and Cartan tensors at the basis vectors; its null space is the
// space of infinitesimal motions.

struct InfinitesimalSpace {
    Basis at;
    std::vector<Eigen::MatrixXd> generators;  // Frobenius-normalized
    int dim = 0;
    std::vector<double> pivots;
};

inline InfinitesimalSpace infinitesimal_space(const FinslerNorm& norm, const Basis& b,
                                              const Tolerances& tol = {}) {
    detail::require_orthonormal(norm, b, "reference", tol);
    const int n = b.count();
    const int rows = n * (n + 1) / 2;

    std::vector<MetricAt> g(static_cast<std::size_t>(n));
    std::vector<CartanAt> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd ek = b.vector(k);
        g[static_cast<std::size_t>(k)] = metric_at(norm, ek, tol.singular_tol);
        c[static_cast<std::size_t>(k)] = cartan_at(norm, ek);
    }

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, n * n);
    int row = 0;
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd ek = b.vector(k);
        for (int l = k; l < n; ++l, ++row) {
            Eigen::VectorXd el = b.vector(l);
            // d phi / d a_{pq}: the perturbation of e_k enters the first slot
            // and the metric's direction, the perturbation of e_l the second
            // slot; delta e_k = a e_k has coefficient (e_k)_q on column (p,q).
            Eigen::VectorXd slot1 = g[static_cast<std::size_t>(k)].g * el;   // index p
            Eigen::VectorXd slot2 = g[static_cast<std::size_t>(k)].g * ek;   // index p
            Eigen::MatrixXd cel = c[static_cast<std::size_t>(k)].c.contract(el);
            Eigen::VectorXd dir = 2.0 * (cel * ek);                          // index p
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    double val = ek[q] * (slot1[p] + dir[p]) + el[q] * slot2[p];
                    jac(row, p * n + q) += val;
                }
        }
    }

    NullSpaceResult ns = null_space(jac, tol.rank_tol);
    InfinitesimalSpace space;
    space.at = b;
    space.pivots = ns.pivots;
    space.dim = static_cast<int>(ns.basis.cols());
    for (int col = 0; col < ns.basis.cols(); ++col) {
        Eigen::MatrixXd a(n, n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) a(p, q) = ns.basis(p * n + q, col);
        double f = a.norm();
        if (f > 0) a /= f;
        space.generators.push_back(std::move(a));
    }
    return space;
}

// Residual change of the constrained orthonormality map under the finite
// perturbation e_k -> (I + eps a) e_k; second-order small for generators.
inline double orthonormality_defect(const FinslerNorm& norm, const Basis& b,
                                    const Eigen::MatrixXd& a, double eps) {
    const int n = b.count();
    TriTable base = scalar_product_table(norm, b);
    Eigen::MatrixXd perturbed = b.matrix() * (Eigen::MatrixXd::Identity(n, n) + eps * a).transpose();
    TriTable moved = scalar_product_table(norm, Basis(std::move(perturbed)));
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l)
            worst = std::max(worst, std::abs(moved.t(k, l) - base.t(k, l)));
    return worst;
}

// Scalar-product defect of an infinitesimal motion:
//   Delta = <x', y'>_{x'} - <x, y>_x  with x' = (I + eps a) x, y' = (I + eps a) y.
inline double scalar_defect(const FinslerNorm& norm, const Eigen::MatrixXd& a,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& y, double eps,
                            double singular_tol = 1e-10) {
    Eigen::VectorXd xp = x + eps * (a * x);
    Eigen::VectorXd yp = y + eps * (a * y);
    return scalar_product(norm, xp, xp, yp, singular_tol) -
           scalar_product(norm, x, x, y, singular_tol);
}

// First-order defect coefficient via Richardson extrapolation over (eps, eps/2).
inline double scalar_defect_rate(const FinslerNorm& norm, const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 double eps, double singular_tol = 1e-10) {
    double d1 = scalar_defect(norm, a, x, y, eps, singular_tol) / eps;
    double d2 = scalar_defect(norm, a, x, y, 0.5 * eps, singular_tol) / (0.5 * eps);
    return 2.0 * d2 - d1;
}

}  // namespace finsler
