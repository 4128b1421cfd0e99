#pragma once

// Central-difference oracle for cross-validating jet derivatives. Only
// order-0 evaluations of F^2 enter the stencils, so the derivative
// propagation rules are checked against plain value arithmetic.
//
// The gradient uses a single central difference at step 2^-17 * scale(v).
// Hessian and third-order stencils are Richardson-extrapolated over (h, h/2)
// from larger base steps: pure second-order stencils at 2^-17 lose ~eps/h^2
// to rounding, which would drown the comparison tolerances; extrapolation
// from 2^-7 (hessian) and 2^-4 (third) keeps truncation and rounding both
// far below the stated bounds. Callers keep sample points far enough from
// non-smooth loci that the widest stencil (reach 2h * scale) stays inside
// the smooth region.

#include <cmath>

#include <Eigen/Dense>

#include "finsler/jet.hpp"
#include "finsler/norm.hpp"

namespace finsler {

struct FdOracle {
    double grad_step = 0x1.0p-17;
    double hess_step = 0x1.0p-7;
    double third_step = 0x1.0p-4;

    static double scale(const Eigen::VectorXd& v) {
        return std::max(1.0, v.lpNorm<Eigen::Infinity>());
    }

    Eigen::VectorXd grad(const FinslerNorm& norm, const Eigen::VectorXd& v) const {
        const int n = norm.dim();
        const double h = grad_step * scale(v);
        Eigen::VectorXd g(n);
        Eigen::VectorXd x = v;
        for (int i = 0; i < n; ++i) {
            x[i] = v[i] + h;
            double fp = eval_f2(norm, x);
            x[i] = v[i] - h;
            double fm = eval_f2(norm, x);
            x[i] = v[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    }

    Eigen::MatrixXd hess(const FinslerNorm& norm, const Eigen::VectorXd& v) const {
        const double h = hess_step * scale(v);
        Eigen::MatrixXd coarse = hess_at(norm, v, h);
        Eigen::MatrixXd fine = hess_at(norm, v, 0.5 * h);
        return (4.0 * fine - coarse) / 3.0;
    }

    SymTensor3 third(const FinslerNorm& norm, const Eigen::VectorXd& v) const {
        const int n = norm.dim();
        const double h = third_step * scale(v);
        SymTensor3 coarse = third_at(norm, v, h);
        SymTensor3 fine = third_at(norm, v, 0.5 * h);
        SymTensor3 t(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = j; k < n; ++k)
                    t(i, j, k) = (4.0 * fine(i, j, k) - coarse(i, j, k)) / 3.0;
        return t;
    }

private:
    static Eigen::MatrixXd hess_at(const FinslerNorm& norm, const Eigen::VectorXd& v,
                                   double h) {
        const int n = norm.dim();
        Eigen::MatrixXd m(n, n);
        const double f0 = eval_f2(norm, v);
        Eigen::VectorXd x = v;
        for (int i = 0; i < n; ++i) {
            x[i] = v[i] + h;
            double fp = eval_f2(norm, x);
            x[i] = v[i] - h;
            double fm = eval_f2(norm, x);
            x[i] = v[i];
            m(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (int si = -1; si <= 1; si += 2)
                    for (int sj = -1; sj <= 1; sj += 2) {
                        x[i] = v[i] + si * h;
                        x[j] = v[j] + sj * h;
                        s += si * sj * eval_f2(norm, x);
                        x[i] = v[i];
                        x[j] = v[j];
                    }
                m(i, j) = m(j, i) = s / (4.0 * h * h);
            }
        return m;
    }

    // d/dv_k of the central hessian stencil, same step both levels.
    static SymTensor3 third_at(const FinslerNorm& norm, const Eigen::VectorXd& v,
                               double h) {
        const int n = norm.dim();
        SymTensor3 t(n);
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd xp = v, xm = v;
            xp[k] += h;
            xm[k] -= h;
            Eigen::MatrixXd hp = hess_at(norm, xp, h);
            Eigen::MatrixXd hm = hess_at(norm, xm, h);
            for (int i = 0; i <= k; ++i)
                for (int j = i; j <= k; ++j)
                    t(i, j, k) = (hp(i, j) - hm(i, j)) / (2.0 * h);
        }
        return t;
    }
};

// Oracle precondition: the point must be far enough from non-smooth loci
// that the widest stencil (reach ~2h * scale) stays in the smooth region.
// Ratio-type norms are singular at the origin of their ratio block; for
// expression norms the whole-vector distance is used conservatively.
inline bool fd_stencil_valid(const FinslerNorm& norm, const Eigen::VectorXd& v) {
    const double s = FdOracle::scale(v);
    if (norm.is_builtin()) {
        switch (norm.builtin().kind) {
            case BuiltinKind::Euclidean:
            case BuiltinKind::Pseudo:
                return true;
            case BuiltinKind::Ratio3:
                return v.norm() >= s;
            case BuiltinKind::Spacetime4:
                return v.tail(3).norm() >= s;
        }
    }
    return v.norm() >= s;
}

struct DiscrepancyReport {
    double grad_rel = 0.0;
    double hess_rel = 0.0;
    double third_rel = 0.0;
    double max_rel() const { return std::max(grad_rel, std::max(hess_rel, third_rel)); }
};

// Max relative disagreement per derivative order between jet_eval and the
// central-difference oracle.
inline DiscrepancyReport fd_check(const FinslerNorm& norm, const Eigen::VectorXd& v,
                                  const FdOracle& oracle = FdOracle{}) {
    Jet3 jet = jet_eval(norm, v, 3);
    DiscrepancyReport rep;

    Eigen::VectorXd gd = oracle.grad(norm, v) - jet.grad;
    rep.grad_rel = gd.lpNorm<Eigen::Infinity>() /
                   std::max(1.0, jet.grad.lpNorm<Eigen::Infinity>());

    Eigen::MatrixXd hd = oracle.hess(norm, v) - jet.hess;
    rep.hess_rel = hd.lpNorm<Eigen::Infinity>() /
                   std::max(1.0, jet.hess.lpNorm<Eigen::Infinity>());

    SymTensor3 td = oracle.third(norm, v);
    double tmax = 0.0;
    const int n = norm.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k)
                tmax = std::max(tmax, std::abs(td(i, j, k) - jet.third(i, j, k)));
    rep.third_rel = tmax / std::max(1.0, jet.third.max_abs());
    return rep;
}

}  // namespace finsler
