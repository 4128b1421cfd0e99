#pragma once

// Pointwise Minkowski-space machinery: the direction-dependent metric tensor
// g_ij(v) = 1/2 d^2F^2/dv_i dv_j, the scalar product it induces, vector
// classification, unit vectors, the Cartan tensor and the homogeneity
// identities that tie them together.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "finsler/error.hpp"
#include "finsler/fd.hpp"
#include "finsler/jet.hpp"
#include "finsler/norm.hpp"
#include "finsler/rng.hpp"

namespace finsler {

struct Tolerances {
    double class_tol = 1e-9;      // |F^2| band for the isotropic class
    double ortho_tol = 1e-8;      // orthogonality / unit-length residuals
    double singular_tol = 1e-10;  // |det g| lower bound
    double rank_tol = 1e-7;       // pivot threshold for null-space extraction
};

struct MetricAt {
    Eigen::VectorXd at;
    Eigen::MatrixXd g;
    double det_g = 0.0;
};

struct CartanAt {
    Eigen::VectorXd at;
    SymTensor3 c;
};

enum class VectorKind { Isotropic, Timelike, Spacelike };

struct VectorClass {
    VectorKind kind;
    double f2;
};

inline const char* vector_kind_name(VectorKind k) {
    switch (k) {
        case VectorKind::Isotropic: return "isotropic";
        case VectorKind::Timelike: return "timelike";
        case VectorKind::Spacelike: return "spacelike";
    }
    return "?";
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

// g_ij(v) = 1/2 d^2 F^2 / dv_i dv_j; nonsingular by contract.
inline MetricAt metric_at(const FinslerNorm& norm, const Eigen::VectorXd& v,
                          double singular_tol = 1e-10) {
    Jet3 j = jet_eval(norm, v, 2);
    MetricAt m;
    m.at = v;
    m.g = 0.5 * j.hess;
    m.det_g = m.g.determinant();
    if (std::abs(m.det_g) <= singular_tol)
        throw Error(ErrorCode::SingularMetric, "metric tensor is singular at the given direction")
            .with("det_g", m.det_g)
            .with("v", to_std(v));
    return m;
}

// <a, b>_v = g_ij(v) a^i b^j. Not commutative in (a, b) roles across
// different direction arguments; the orthogonality relation fixes v to the
// first vector of the pair.
inline double scalar_product(const FinslerNorm& norm, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             double singular_tol = 1e-10) {
    return a.dot(metric_at(norm, v, singular_tol).g * b);
}

inline VectorClass classify(const FinslerNorm& norm, const Eigen::VectorXd& v,
                            double class_tol = 1e-9) {
    double f2 = eval_f2(norm, v);
    VectorKind k = VectorKind::Isotropic;
    if (f2 > class_tol) k = VectorKind::Spacelike;
    else if (f2 < -class_tol) k = VectorKind::Timelike;
    return VectorClass{k, f2};
}

// v / sqrt(|F^2(v)|); the squared norm of the result is +1 or -1.
inline Eigen::VectorXd unit_vector(const FinslerNorm& norm, const Eigen::VectorXd& v,
                                   double class_tol = 1e-9) {
    double f2 = eval_f2(norm, v);
    if (std::abs(f2) <= class_tol)
        throw Error(ErrorCode::IsotropicVector, "cannot normalize an isotropic vector")
            .with("f2", f2)
            .with("v", to_std(v));
    return v / std::sqrt(std::abs(f2));
}

// C_ijk(v) = 1/2 dg_ij/dv_k = 1/4 d^3F^2/dv_i dv_j dv_k; fully symmetric,
// degree -1 homogeneous, contracts to zero against v.
inline CartanAt cartan_at(const FinslerNorm& norm, const Eigen::VectorXd& v) {
    Jet3 j = jet_eval(norm, v, 3);
    CartanAt c;
    c.at = v;
    c.c = j.third;
    c.c *= 0.25;
    return c;
}

// Residuals of the Euler-theorem corollaries for a degree-2 homogeneous F^2:
//   (i)   v^i dF^2/dv^i - 2 F^2
//   (ii)  g_ij v^i v^j - F^2
//   (iii) dg_ij/dv^k v^k          (degree-0 homogeneity of the metric)
//   (iv)  dF^2/dv^j - 2 g_ij v^i
// Each residual is reported relative to the magnitude of its own terms.
struct EulerReport {
    double euler_f2 = 0.0;
    double contraction = 0.0;
    double metric_homogeneity = 0.0;
    double grad_identity = 0.0;
    double max_residual() const {
        return std::max(std::max(euler_f2, contraction),
                        std::max(metric_homogeneity, grad_identity));
    }
};

inline EulerReport euler_report(const FinslerNorm& norm, const Eigen::VectorXd& v) {
    Jet3 j = jet_eval(norm, v, 3);
    Eigen::MatrixXd g = 0.5 * j.hess;
    EulerReport r;

    double lhs1 = v.dot(j.grad);
    r.euler_f2 = std::abs(lhs1 - 2.0 * j.value) /
                 std::max(1.0, std::max(std::abs(lhs1), std::abs(2.0 * j.value)));

    double lhs2 = v.dot(g * v);
    r.contraction = std::abs(lhs2 - j.value) /
                    std::max(1.0, std::max(std::abs(lhs2), std::abs(j.value)));

    // dg_ij/dv^k v^k = 1/2 (third . v)_ij
    Eigen::MatrixXd dgv = 0.5 * j.third.contract(v);
    r.metric_homogeneity = dgv.lpNorm<Eigen::Infinity>() /
                           std::max(1.0, g.lpNorm<Eigen::Infinity>());

    Eigen::VectorXd diff4 = j.grad - 2.0 * (g * v);
    r.grad_identity = diff4.lpNorm<Eigen::Infinity>() /
                      std::max(1.0, j.grad.lpNorm<Eigen::Infinity>());
    return r;
}

// ---------------------------------------------------------------------------
// Speed-of-light experiment on a product-form norm F^2 = -c^2 (v^0)^2 + F3^2.
// A spatial direction is scaled to unit spatial length and the isotropy
// equation F^2 = 0 is solved for the propagation time v^0; for the product
// form the result is 1/c independent of direction.

struct SpeedReport {
    double c = 0.0;
    double v0_at_direction = 0.0;
    int trials = 0;
    double v0_min = 0.0;
    double v0_max = 0.0;
    double v0_mean = 0.0;
    double spread() const { return v0_max - v0_min; }
};

namespace detail {

inline double light_time(const FinslerNorm& spatial, double c, const Eigen::VectorXd& d,
                         double class_tol) {
    double f3 = eval_f2(spatial, d);
    if (f3 <= class_tol)
        throw Error(ErrorCode::IsotropicDirection,
                    "spatial direction has non-positive squared length")
            .with("f3_sq", f3)
            .with("d", to_std(d));
    Eigen::VectorXd u = d / std::sqrt(f3);
    // F^2(v0, u) = 0  =>  c^2 v0^2 = F3^2(u)
    return std::sqrt(eval_f2(spatial, u)) / c;
}

}  // namespace detail

inline SpeedReport light_speed(const FinslerNorm& norm4, double c, const Eigen::VectorXd& d,
                               int trials, std::uint64_t rng_seed = 0,
                               double class_tol = 1e-9) {
    if (!norm4.is_builtin() || norm4.builtin().kind != BuiltinKind::Spacetime4)
        throw Error(ErrorCode::NotProductForm,
                    "light_speed requires a norm declared as -c^2 (v0)^2 + F3^2");
    const Builtin& b = norm4.builtin();
    if (std::abs(b.c - c) > 1e-12 * std::max(1.0, std::abs(b.c)))
        throw Error(ErrorCode::NotProductForm,
                    "requested c does not match the declared product form")
            .with("declared_c", b.c)
            .with("requested_c", c);

    FinslerNorm spatial = ratio3(b.A);
    SpeedReport rep;
    rep.c = c;
    rep.v0_at_direction = detail::light_time(spatial, c, d, class_tol);
    rep.trials = trials;

    SplitMix64 rng = SplitMix64(rng_seed).split(/*tag=*/0x4C49474854ULL);  // "LIGHT"
    double lo = rep.v0_at_direction, hi = rep.v0_at_direction, sum = 0.0;
    int done = 0;
    while (done < trials) {
        Eigen::VectorXd dir = rng.nonzero_vector(3, -1.0, 1.0);
        if (eval_f2(spatial, dir) <= class_tol) continue;
        double v0 = detail::light_time(spatial, c, dir, class_tol);
        lo = std::min(lo, v0);
        hi = std::max(hi, v0);
        sum += v0;
        ++done;
    }
    rep.v0_min = lo;
    rep.v0_max = hi;
    rep.v0_mean = trials > 0 ? sum / trials : rep.v0_at_direction;
    return rep;
}

}  // namespace finsler
