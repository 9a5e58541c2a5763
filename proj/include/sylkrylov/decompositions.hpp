#pragma once

#include <vector>

#include "sylkrylov/dense_matrix.hpp"

namespace sylkrylov {

struct QrResult {
    DenseMatrix q;  // n x s, column-orthonormal
    DenseMatrix r;  // s x s, upper triangular with nonnegative diagonal
};

/// Householder thin QR with a sign fix so the diagonal of R is nonnegative.
/// Requires n_rows >= n_cols. Rank deficiency is permitted; R may be singular.
QrResult thin_qr(const DenseMatrix& x);

/// Householder QR for any shape: Q is n x min(n, s), R is min(n, s) x s
/// upper trapezoidal with nonnegative diagonal, and Q R = X.
QrResult compact_qr(const DenseMatrix& x);

struct SvdResult {
    DenseMatrix u;                      // n x r
    std::vector<double> singular_values;  // nonincreasing, nonnegative, length r = min(n, m)
    DenseMatrix v;                      // m x r
};

/// Thin SVD, X = U diag(sigma) V^T.
SvdResult svd(const DenseMatrix& x);

struct SymmetricEigResult {
    std::vector<double> eigenvalues;  // ascending
    DenseMatrix vectors;              // columns are eigenvectors
};

/// Eigendecomposition of a symmetric matrix.
SymmetricEigResult symmetric_eig(const DenseMatrix& x);

}  // namespace sylkrylov
