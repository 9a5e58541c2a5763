#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sylkrylov {

using index_t = std::ptrdiff_t;

/// Column-major dense matrix of real64 entries.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t n_rows, index_t n_cols);

    /// Row-major nested initializer, for literal matrices in tests and docs.
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(index_t n);
    static DenseMatrix zeros(index_t n_rows, index_t n_cols);

    index_t rows() const { return n_rows_; }
    index_t cols() const { return n_cols_; }
    bool empty() const { return n_rows_ == 0 || n_cols_ == 0; }

    double& operator()(index_t i, index_t j) { return values_[static_cast<size_t>(j * n_rows_ + i)]; }
    double operator()(index_t i, index_t j) const { return values_[static_cast<size_t>(j * n_rows_ + i)]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    const std::vector<double>& values() const { return values_; }

    /// Copy of the leading r x c block.
    DenseMatrix top_left(index_t r, index_t c) const;
    /// Copy of columns [first, first+count).
    DenseMatrix columns(index_t first, index_t count) const;

    DenseMatrix transposed() const;

    void scale(double alpha);

private:
    index_t n_rows_ = 0;
    index_t n_cols_ = 0;
    std::vector<double> values_;
};

DenseMatrix operator+(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix operator*(double alpha, const DenseMatrix& x);

/// y += alpha * x
void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y);

/// A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

/// tr(X^T Y) = sum_ij X_ij Y_ij.
double frobenius_inner(const DenseMatrix& x, const DenseMatrix& y);

double frobenius_norm(const DenseMatrix& x);

/// Inner product of `small` against the leading block of `big` with
/// `small`'s shape, without materializing the submatrix.
double windowed_inner(const DenseMatrix& small, const DenseMatrix& big);

double max_abs(const DenseMatrix& x);

}  // namespace sylkrylov
