#pragma once

// Rank-revealing elimination helpers. Null spaces here must report their
// pivots: a pivot falling inside the ambiguity band around the threshold is
// an error, not a silent rank decision.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "finsler/error.hpp"

namespace finsler {

struct NullSpaceResult {
    Eigen::MatrixXd basis;        // columns span the null space
    std::vector<double> pivots;   // accepted pivot magnitudes
    int rank = 0;
};

// Gaussian elimination with full pivoting at threshold `rank_tol`. Pivots
// below rank_tol are zero; pivots in [rank_tol, 10*rank_tol) are ambiguous
// and raise RankDeficiencyAmbiguous rather than guessing the rank.
inline NullSpaceResult null_space(Eigen::MatrixXd a, double rank_tol) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    std::vector<int> pivot_col;
    std::vector<double> pivots;
    int r = 0;
    std::vector<bool> col_used(static_cast<std::size_t>(cols), false);

    while (r < rows) {
        // full pivot over remaining rows x unused columns
        double best = 0.0;
        int bi = -1, bj = -1;
        for (int i = r; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                if (col_used[static_cast<std::size_t>(j)]) continue;
                double m = std::abs(a(i, j));
                if (m > best) { best = m; bi = i; bj = j; }
            }
        if (best < rank_tol) break;
        if (best < 10.0 * rank_tol)
            throw Error(ErrorCode::RankDeficiencyAmbiguous,
                        "pivot magnitude falls in the ambiguity band around rank_tol")
                .with("pivot", best)
                .with("rank_tol", rank_tol);
        a.row(r).swap(a.row(bi));
        col_used[static_cast<std::size_t>(bj)] = true;
        pivot_col.push_back(bj);
        pivots.push_back(best);
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            double f = a(i, bj) / a(r, bj);
            if (f != 0.0) a.row(i) -= f * a.row(r);
        }
        ++r;
    }

    NullSpaceResult res;
    res.rank = r;
    res.pivots = pivots;
    res.basis = Eigen::MatrixXd::Zero(cols, cols - r);
    int out = 0;
    for (int f = 0; f < cols; ++f) {
        if (col_used[static_cast<std::size_t>(f)]) continue;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
        x[f] = 1.0;
        for (int i = 0; i < r; ++i) {
            int pc = pivot_col[static_cast<std::size_t>(i)];
            x[pc] = -a(i, f) / a(i, pc);
        }
        res.basis.col(out++) = x;
    }
    return res;
}

}  // namespace finsler
