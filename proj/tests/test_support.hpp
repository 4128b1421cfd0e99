#pragma once

// Shared helpers for the test suites: oracle-grade sampling and the
// classical Gram-Schmidt reference.

#include <Eigen/Dense>

#include "finsler/fd.hpp"
#include "finsler/norm.hpp"
#include "finsler/rng.hpp"

namespace finsler::testing {

// Sample a point satisfying the oracle's stencil-validity precondition.
inline Eigen::VectorXd fd_sample_point(SplitMix64& rng, const FinslerNorm& norm) {
    const int n = norm.dim();
    for (;;) {
        Eigen::VectorXd v = rng.nonzero_vector(n, -2.0, 2.0, 0.3);
        if (fd_stencil_valid(norm, v)) return v;
    }
}

inline Eigen::MatrixXd classical_gram_schmidt(const Eigen::MatrixXd& seed) {
    const int n = static_cast<int>(seed.rows());
    Eigen::MatrixXd out(n, seed.cols());
    for (int m = 0; m < n; ++m) {
        Eigen::VectorXd e = seed.row(m).transpose();
        for (int i = 0; i < m; ++i) {
            Eigen::VectorXd ei = out.row(i).transpose();
            e -= ei.dot(seed.row(m).transpose()) * ei;
        }
        out.row(m) = (e / e.norm()).transpose();
    }
    return out;
}

}  // namespace finsler::testing
