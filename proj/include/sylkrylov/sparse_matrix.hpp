#pragma once

#include <vector>

#include "sylkrylov/dense_matrix.hpp"

namespace sylkrylov {

/// Compressed sparse row matrix of real64 entries. Column indices within
/// each row are strictly increasing.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Takes ownership of CSR arrays and validates the structure.
    SparseMatrix(index_t n_rows, index_t n_cols, std::vector<index_t> row_ptr,
                 std::vector<index_t> col_idx, std::vector<double> values);

    /// Builds CSR from (row, col, value) triplets; duplicates are summed.
    static SparseMatrix from_triplets(index_t n_rows, index_t n_cols,
                                      std::vector<index_t> rows, std::vector<index_t> cols,
                                      std::vector<double> values);

    static SparseMatrix identity(index_t n);

    index_t rows() const { return n_rows_; }
    index_t cols() const { return n_cols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    const std::vector<index_t>& row_ptr() const { return row_ptr_; }
    const std::vector<index_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    SparseMatrix transposed() const;

    double frobenius_norm() const;
    double max_abs() const;

    /// ||A - A^T||_F <= tol * ||A||_F, comparing entries pairwise.
    bool is_symmetric(double tol = 1e-12) const;

private:
    index_t n_rows_ = 0;
    index_t n_cols_ = 0;
    std::vector<index_t> row_ptr_{0};
    std::vector<index_t> col_idx_;
    std::vector<double> values_;
};

/// A * X with per-entry accumulation in stored index order.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);

/// A^T * X, scattering rows of A in ascending row order.
DenseMatrix spmm_transpose(const SparseMatrix& a, const DenseMatrix& x);

/// X * B for dense X, scattering columns of B in ascending row order.
DenseMatrix dense_times_sparse(const DenseMatrix& x, const SparseMatrix& b);

/// Densifies A (for small oracles and the Kronecker assembly).
DenseMatrix to_dense(const SparseMatrix& a);

}  // namespace sylkrylov
