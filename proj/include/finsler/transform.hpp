#pragma once

// Passive coordinate changes. The transformed metric evaluator is the norm
// F'^2(v') = F^2(A v') where v' are the coordinates of the same geometric
// vector in the new basis: differentiating through the pullback reproduces
// the tensor law g'_ij(v') = g_kl(A v') A^k_i A^l_j by the chain rule, which
// makes congruence against the directly transformed matrix a genuine
// two-route consistency check.

#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "finsler/error.hpp"
#include "finsler/norm.hpp"

namespace finsler {

inline FinslerNorm passive_transform(NormPtr norm, Eigen::MatrixXd a,
                                     double singular_tol = 1e-12) {
    if (a.rows() != a.cols() || static_cast<int>(a.rows()) != norm->dim())
        throw Error(ErrorCode::SingularTransform, "transform shape does not match dimension");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(singular_tol);
    if (!lu.isInvertible())
        throw Error(ErrorCode::SingularTransform, "transform matrix is singular")
            .with("det", a.determinant());
    int n = norm->dim();
    return FinslerNorm(n, Pullback{std::move(norm), std::move(a)});
}

inline FinslerNorm passive_transform(const FinslerNorm& norm, const Eigen::MatrixXd& a,
                                     double singular_tol = 1e-12) {
    return passive_transform(std::make_shared<FinslerNorm>(norm), a, singular_tol);
}

}  // namespace finsler
