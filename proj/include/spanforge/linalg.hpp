#ifndef SPANFORGE_LINALG_HPP
#define SPANFORGE_LINALG_HPP

#include <spanforge/rational.hpp>

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace spanforge {

template <class T>
using DenseMatrix = std::vector<std::vector<T>>;

/// Exact determinant by fraction-free Bareiss elimination.
inline BigInt determinant(DenseMatrix<BigInt> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    int sign = 1;
    BigInt previous = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous;
            }
        }
        previous = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

/// Exact determinant by Gaussian elimination over the rationals.
inline Rational determinant(DenseMatrix<Rational> m) {
    const std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        while (pivot < n && m[pivot][k] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != k) {
            std::swap(m[k], m[pivot]);
            det = -det;
        }
        det *= m[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            if (m[i][k] == 0) continue;
            Rational factor = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] -= factor * m[k][j];
        }
    }
    return det;
}

/// Double-precision determinant (partial-pivot LU). The empty matrix has
/// determinant 1.
inline double determinant(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 1.0;
    return m.partialPivLu().determinant();
}

/// Submatrix keeping only the listed row/column indices.
inline Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& keep) {
    const auto n = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = m(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(keep[static_cast<std::size_t>(j)]));
    return out;
}

}  // namespace spanforge

#endif
