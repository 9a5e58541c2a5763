#pragma once

#include <optional>

#include "sylkrylov/dense_matrix.hpp"
#include "sylkrylov/sparse_matrix.hpp"

namespace sylkrylov {

/// U * S * V^T with tall factors and a small general core.
struct LowRankMatrix {
    DenseMatrix U;  // n x r
    DenseMatrix S;  // r x r
    DenseMatrix V;  // m x r
    bool u_orthonormal = false;
    bool v_orthonormal = false;

    index_t rows() const { return U.rows(); }
    index_t cols() const { return V.rows(); }
    index_t rank() const { return S.rows(); }

    static LowRankMatrix zero(index_t n, index_t m);
    /// C1 * C2^T as a rank-s factorization with identity core.
    static LowRankMatrix outer(const DenseMatrix& c1, const DenseMatrix& c2);
};

/// Z * D * Z^T with symmetric (possibly indefinite) core.
struct SymmetricLowRankMatrix {
    DenseMatrix Z;  // n x r
    DenseMatrix D;  // r x r symmetric

    index_t rows() const { return Z.rows(); }
    index_t rank() const { return D.rows(); }

    static SymmetricLowRankMatrix zero(index_t n);
    /// C1 * C1^T.
    static SymmetricLowRankMatrix outer(const DenseMatrix& c1);
};

/// Factor-stacking addition: a + alpha * b.
LowRankMatrix lr_add(const LowRankMatrix& a, double alpha, const LowRankMatrix& b);
SymmetricLowRankMatrix slr_add(const SymmetricLowRankMatrix& a, double alpha,
                               const SymmetricLowRankMatrix& b);

LowRankMatrix lr_scale(double alpha, const LowRankMatrix& m);
SymmetricLowRankMatrix slr_scale(double alpha, const SymmetricLowRankMatrix& m);

/// A * M + M * B in stacked low-rank form (rank doubles).
LowRankMatrix lr_sylvester_op(const SparseMatrix& a, const SparseMatrix& b, const LowRankMatrix& m);
/// A * M + M * A^T in stacked symmetric form (rank doubles).
SymmetricLowRankMatrix slr_lyapunov_op(const SparseMatrix& a, const SymmetricLowRankMatrix& m);

/// tr(S1^T (U1^T U2) S2 (V2^T V1)), small products first.
double lr_inner(const LowRankMatrix& a, const LowRankMatrix& b);
double slr_inner(const SymmetricLowRankMatrix& a, const SymmetricLowRankMatrix& b);

double lr_norm(const LowRankMatrix& m);
double slr_norm(const SymmetricLowRankMatrix& m);

DenseMatrix lr_to_dense(const LowRankMatrix& m);
DenseMatrix slr_to_dense(const SymmetricLowRankMatrix& m);

/// Recompression: orthogonalize the factors, SVD the transformed core, drop
/// singular values below eps_T relative to the largest (and beyond max_rank).
/// Result sides are orthonormal.
LowRankMatrix truncate(const LowRankMatrix& m, double eps_t,
                       std::optional<index_t> max_rank = std::nullopt);

/// Symmetric recompression via eigendecomposition of the transformed core;
/// eigenvalues dropped by |lambda_i| < eps_T * |lambda_1|.
SymmetricLowRankMatrix symmetric_truncate(const SymmetricLowRankMatrix& m, double eps_t,
                                          std::optional<index_t> max_rank = std::nullopt);

}  // namespace sylkrylov
