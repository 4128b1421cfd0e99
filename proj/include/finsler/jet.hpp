#pragma once

// Forward-mode truncated Taylor arithmetic of order <= 3 in n variables.
// A Jet3 carries the value, gradient, Hessian and the symmetric third-order
// coefficient tensor of a scalar quantity; arithmetic propagates them by the
// Leibniz rule and Faa di Bruno's formula, truncated at the jet's order.
// On polynomial inputs of total degree <= 3 every stored coefficient equals
// the analytic derivative exactly.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "finsler/error.hpp"

namespace finsler {

// Symmetric n x n x n tensor stored on the multiset-indexed upper simplex
// i <= j <= k; access with any index order is routed through a sort, so full
// index symmetry holds by storage.
class SymTensor3 {
public:
    SymTensor3() : n_(0) {}
    explicit SymTensor3(int n)
        : n_(n), data_(static_cast<std::size_t>(n) * (n + 1) * (n + 2) / 6, 0.0) {}

    int dim() const { return n_; }

    double operator()(int i, int j, int k) const { return data_[offset(i, j, k)]; }
    double& operator()(int i, int j, int k) { return data_[offset(i, j, k)]; }

    // Contraction over one slot: M_ij = sum_k T_ijk v_k (symmetric result).
    Eigen::MatrixXd contract(const Eigen::VectorXd& v) const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < n_; ++k) s += (*this)(i, j, k) * v[k];
                m(i, j) = s;
                m(j, i) = s;
            }
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    SymTensor3& operator+=(const SymTensor3& o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    SymTensor3& operator-=(const SymTensor3& o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    SymTensor3& operator*=(double s) {
        for (double& x : data_) x *= s;
        return *this;
    }

    const std::vector<double>& raw() const { return data_; }

private:
    std::size_t offset(int i, int j, int k) const {
        // sort (i, j, k) ascending
        if (i > j) std::swap(i, j);
        if (j > k) std::swap(j, k);
        if (i > j) std::swap(i, j);
        std::size_t off = 0;
        for (int a = 0; a < i; ++a) {
            std::size_t m = static_cast<std::size_t>(n_ - a);
            off += m * (m + 1) / 2;
        }
        for (int b = i; b < j; ++b) off += static_cast<std::size_t>(n_ - b);
        off += static_cast<std::size_t>(k - j);
        return off;
    }

    int n_;
    std::vector<double> data_;
};

struct Jet3 {
    int n = 0;
    int order = 2;  // truncation order, 0..3
    double value = 0.0;
    Eigen::VectorXd grad;  // d/dv_i
    Eigen::MatrixXd hess;  // d2/dv_i dv_j, kept symmetric by construction
    SymTensor3 third;      // d3/dv_i dv_j dv_k

    Jet3() = default;
    Jet3(int n_, int order_) : n(n_), order(order_) {
        grad = Eigen::VectorXd::Zero(n);
        hess = Eigen::MatrixXd::Zero(n, n);
        third = SymTensor3(n);
    }

    static Jet3 constant(int n, int order, double c) {
        Jet3 j(n, order);
        j.value = c;
        return j;
    }

    // Seed for the i-th differentiation variable.
    static Jet3 variable(int n, int order, int i, double v) {
        Jet3 j(n, order);
        j.value = v;
        if (order >= 1) j.grad[i] = 1.0;
        return j;
    }

    // Seed with a prescribed first-order row (used by linear pullbacks).
    static Jet3 linear(int n, int order, double v, const Eigen::VectorXd& row) {
        Jet3 j(n, order);
        j.value = v;
        if (order >= 1) j.grad = row;
        return j;
    }
};

namespace jet_ops {

inline Jet3 add(const Jet3& a, const Jet3& b) {
    Jet3 r = a;
    r.value += b.value;
    if (r.order >= 1) r.grad += b.grad;
    if (r.order >= 2) r.hess += b.hess;
    if (r.order >= 3) r.third += b.third;
    return r;
}

inline Jet3 sub(const Jet3& a, const Jet3& b) {
    Jet3 r = a;
    r.value -= b.value;
    if (r.order >= 1) r.grad -= b.grad;
    if (r.order >= 2) r.hess -= b.hess;
    if (r.order >= 3) r.third -= b.third;
    return r;
}

inline Jet3 neg(const Jet3& a) {
    Jet3 r = a;
    r.value = -r.value;
    if (r.order >= 1) r.grad = -r.grad;
    if (r.order >= 2) r.hess = -r.hess;
    if (r.order >= 3) r.third *= -1.0;
    return r;
}

inline Jet3 scale(const Jet3& a, double s) {
    Jet3 r = a;
    r.value *= s;
    if (r.order >= 1) r.grad *= s;
    if (r.order >= 2) r.hess *= s;
    if (r.order >= 3) r.third *= s;
    return r;
}

// Leibniz rule through third order.
inline Jet3 mul(const Jet3& a, const Jet3& b) {
    Jet3 r(a.n, a.order);
    r.value = a.value * b.value;
    if (r.order >= 1) r.grad = a.grad * b.value + b.grad * a.value;
    if (r.order >= 2) {
        r.hess = a.hess * b.value + b.hess * a.value;
        r.hess += a.grad * b.grad.transpose() + b.grad * a.grad.transpose();
    }
    if (r.order >= 3) {
        for (int i = 0; i < r.n; ++i)
            for (int j = i; j < r.n; ++j)
                for (int k = j; k < r.n; ++k) {
                    r.third(i, j, k) =
                        a.third(i, j, k) * b.value + b.third(i, j, k) * a.value +
                        a.hess(i, j) * b.grad[k] + a.hess(i, k) * b.grad[j] +
                        a.hess(j, k) * b.grad[i] + b.hess(i, j) * a.grad[k] +
                        b.hess(i, k) * a.grad[j] + b.hess(j, k) * a.grad[i];
                }
    }
    return r;
}

// Faa di Bruno for a scalar map f with derivatives d[0..3] at a.value.
inline Jet3 compose(const Jet3& a, const double d[4]) {
    Jet3 r(a.n, a.order);
    r.value = d[0];
    if (r.order >= 1) r.grad = d[1] * a.grad;
    if (r.order >= 2)
        r.hess = d[1] * a.hess + d[2] * (a.grad * a.grad.transpose());
    if (r.order >= 3) {
        for (int i = 0; i < r.n; ++i)
            for (int j = i; j < r.n; ++j)
                for (int k = j; k < r.n; ++k) {
                    r.third(i, j, k) =
                        d[1] * a.third(i, j, k) +
                        d[2] * (a.grad[i] * a.hess(j, k) + a.grad[j] * a.hess(i, k) +
                                a.grad[k] * a.hess(i, j)) +
                        d[3] * a.grad[i] * a.grad[j] * a.grad[k];
                }
    }
    return r;
}

inline Jet3 recip(const Jet3& a) {
    if (a.value == 0.0)
        throw Error(ErrorCode::DomainError, "division by zero")
            .with("denominator", 0.0);
    const double u = a.value;
    const double d[4] = {1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u),
                         -6.0 / (u * u * u * u)};
    return compose(a, d);
}

// Division as multiplication by the reciprocal jet.
inline Jet3 div(const Jet3& a, const Jet3& b) { return mul(a, recip(b)); }

// Integer power by repeated multiplication; exact for polynomial inputs and
// defined for any base (negative exponents go through recip).
inline Jet3 powi(const Jet3& a, long long e) {
    if (e < 0) return recip(powi(a, -e));
    Jet3 acc = Jet3::constant(a.n, a.order, 1.0);
    Jet3 base = a;
    long long k = e;
    while (k > 0) {
        if (k & 1) acc = mul(acc, base);
        base = mul(base, base);
        k >>= 1;
    }
    return acc;
}

// Real power u^r for non-integer rational r; defined only for u > 0.
inline Jet3 powr(const Jet3& a, double r) {
    if (!(a.value > 0.0))
        throw Error(ErrorCode::DomainError,
                    "non-integer power of a non-positive base")
            .with("base", a.value)
            .with("exponent", r);
    const double u = a.value;
    const double p = std::pow(u, r);
    const double d[4] = {p, r * p / u, r * (r - 1.0) * p / (u * u),
                         r * (r - 1.0) * (r - 2.0) * p / (u * u * u)};
    return compose(a, d);
}

inline Jet3 sqrt(const Jet3& a) {
    if (a.value == 0.0 && a.order == 0) return Jet3::constant(a.n, 0, 0.0);
    return powr(a, 0.5);
}

// |u|: smooth branch selection away from 0; the derivative does not exist
// at u = 0, so jets of order >= 1 refuse there.
inline Jet3 abs(const Jet3& a) {
    if (a.value > 0.0) return a;
    if (a.value < 0.0) return neg(a);
    if (a.order == 0) return Jet3::constant(a.n, 0, 0.0);
    throw Error(ErrorCode::NonSmoothError, "abs evaluated at 0 with derivatives requested");
}

}  // namespace jet_ops
}  // namespace finsler
