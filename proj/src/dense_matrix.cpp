#include "sylkrylov/dense_matrix.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstring>

#include "sylkrylov/errors.hpp"

namespace sylkrylov {

namespace {

using EigenMap = Eigen::Map<Eigen::MatrixXd>;
using ConstEigenMap = Eigen::Map<const Eigen::MatrixXd>;

ConstEigenMap as_eigen(const DenseMatrix& m) {
    return ConstEigenMap(m.data(), m.rows(), m.cols());
}

EigenMap as_eigen(DenseMatrix& m) {
    return EigenMap(m.data(), m.rows(), m.cols());
}

void require_same_shape(const DenseMatrix& x, const DenseMatrix& y, const char* op) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionError(std::string(op) + ": shapes " + std::to_string(x.rows()) + "x" +
                             std::to_string(x.cols()) + " and " + std::to_string(y.rows()) + "x" +
                             std::to_string(y.cols()) + " differ");
}

}  // namespace

DenseMatrix::DenseMatrix(index_t n_rows, index_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), values_(static_cast<size_t>(n_rows * n_cols), 0.0) {
    if (n_rows < 0 || n_cols < 0) throw DimensionError("DenseMatrix: negative dimension");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    n_rows_ = static_cast<index_t>(rows.size());
    n_cols_ = n_rows_ > 0 ? static_cast<index_t>(rows.begin()->size()) : 0;
    values_.assign(static_cast<size_t>(n_rows_ * n_cols_), 0.0);
    index_t i = 0;
    for (const auto& row : rows) {
        if (static_cast<index_t>(row.size()) != n_cols_)
            throw DimensionError("DenseMatrix: ragged initializer");
        index_t j = 0;
        for (double v : row) (*this)(i, j++) = v;
        ++i;
    }
}

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::zeros(index_t n_rows, index_t n_cols) { return DenseMatrix(n_rows, n_cols); }

DenseMatrix DenseMatrix::top_left(index_t r, index_t c) const {
    if (r > n_rows_ || c > n_cols_) throw DimensionError("top_left: block exceeds matrix");
    DenseMatrix out(r, c);
    for (index_t j = 0; j < c; ++j)
        std::memcpy(out.data() + j * r, data() + j * n_rows_, static_cast<size_t>(r) * sizeof(double));
    return out;
}

DenseMatrix DenseMatrix::columns(index_t first, index_t count) const {
    if (first < 0 || first + count > n_cols_) throw DimensionError("columns: range exceeds matrix");
    DenseMatrix out(n_rows_, count);
    std::memcpy(out.data(), data() + first * n_rows_, static_cast<size_t>(n_rows_ * count) * sizeof(double));
    return out;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix out(n_cols_, n_rows_);
    as_eigen(out) = as_eigen(*this).transpose();
    return out;
}

void DenseMatrix::scale(double alpha) {
    for (double& v : values_) v *= alpha;
}

DenseMatrix operator+(const DenseMatrix& x, const DenseMatrix& y) {
    require_same_shape(x, y, "operator+");
    DenseMatrix out(x.rows(), x.cols());
    as_eigen(out) = as_eigen(x) + as_eigen(y);
    return out;
}

DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y) {
    require_same_shape(x, y, "operator-");
    DenseMatrix out(x.rows(), x.cols());
    as_eigen(out) = as_eigen(x) - as_eigen(y);
    return out;
}

DenseMatrix operator*(double alpha, const DenseMatrix& x) {
    DenseMatrix out = x;
    out.scale(alpha);
    return out;
}

void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y) {
    require_same_shape(x, y, "axpy");
    as_eigen(y) += alpha * as_eigen(x);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
    DenseMatrix out(a.rows(), b.cols());
    as_eigen(out).noalias() = as_eigen(a) * as_eigen(b);
    return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_at_b: inner dimensions differ");
    DenseMatrix out(a.cols(), b.cols());
    as_eigen(out).noalias() = as_eigen(a).transpose() * as_eigen(b);
    return out;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("matmul_a_bt: inner dimensions differ");
    DenseMatrix out(a.rows(), b.rows());
    as_eigen(out).noalias() = as_eigen(a) * as_eigen(b).transpose();
    return out;
}

double frobenius_inner(const DenseMatrix& x, const DenseMatrix& y) {
    require_same_shape(x, y, "frobenius_inner");
    double acc = 0.0;
    const double* px = x.data();
    const double* py = y.data();
    const size_t n = x.values().size();
    for (size_t i = 0; i < n; ++i) acc += px[i] * py[i];
    return acc;
}

double frobenius_norm(const DenseMatrix& x) {
    return as_eigen(x).norm();
}

double windowed_inner(const DenseMatrix& small, const DenseMatrix& big) {
    if (small.rows() > big.rows() || small.cols() > big.cols())
        throw DimensionError("windowed_inner: window exceeds matrix");
    double acc = 0.0;
    for (index_t j = 0; j < small.cols(); ++j)
        for (index_t i = 0; i < small.rows(); ++i) acc += small(i, j) * big(i, j);
    return acc;
}

double max_abs(const DenseMatrix& x) {
    double m = 0.0;
    for (double v : x.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace sylkrylov
