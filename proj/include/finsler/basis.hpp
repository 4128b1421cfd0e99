#pragma once

// Ordered tuples of vectors. Order is semantic: the orthogonality relation
// evaluates the metric at the earlier vector, so permuting a basis changes
// which products are constrained.

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "finsler/error.hpp"

namespace finsler {

class Basis {
public:
    Basis() = default;

    // rows: row k holds the coordinates of vector e_k.
    explicit Basis(Eigen::MatrixXd rows) : rows_(std::move(rows)) {}

    Basis(std::initializer_list<std::initializer_list<double>> rows) {
        int r = static_cast<int>(rows.size());
        int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        rows_.resize(r, c);
        int i = 0;
        for (const auto& row : rows) {
            int j = 0;
            for (double x : row) rows_(i, j++) = x;
            ++i;
        }
    }

    static Basis standard(int n) { return Basis(Eigen::MatrixXd::Identity(n, n)); }

    int count() const { return static_cast<int>(rows_.rows()); }
    int dim() const { return static_cast<int>(rows_.cols()); }
    bool square() const { return count() == dim(); }

    Eigen::VectorXd vector(int k) const { return rows_.row(k).transpose(); }
    const Eigen::MatrixXd& matrix() const { return rows_; }

    double det() const {
        if (!square())
            throw Error(ErrorCode::ConfigError, "determinant of a non-square basis");
        return rows_.determinant();
    }

    // Linear independence of the rows (full row rank at threshold tol).
    bool independent(double tol = 1e-10) const {
        if (count() == 0 || count() > dim()) return false;
        if (square()) return std::abs(det()) > tol;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows_);
        return svd.singularValues().minCoeff() > tol;
    }

private:
    Eigen::MatrixXd rows_;
};

}  // namespace finsler
