#include "sylkrylov/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sylkrylov/errors.hpp"
#include "sylkrylov/parallel.hpp"

namespace sylkrylov {

SparseMatrix::SparseMatrix(index_t n_rows, index_t n_cols, std::vector<index_t> row_ptr,
                           std::vector<index_t> col_idx, std::vector<double> values)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (n_rows_ < 0 || n_cols_ < 0) throw InvalidMatrixError("SparseMatrix: negative dimension");
    if (static_cast<index_t>(row_ptr_.size()) != n_rows_ + 1)
        throw InvalidMatrixError("SparseMatrix: row_ptr length must be n_rows+1");
    if (row_ptr_.front() != 0 || row_ptr_.back() != static_cast<index_t>(values_.size()))
        throw InvalidMatrixError("SparseMatrix: row_ptr endpoints inconsistent with nnz");
    if (col_idx_.size() != values_.size())
        throw InvalidMatrixError("SparseMatrix: col_idx and values lengths differ");
    for (index_t i = 0; i < n_rows_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1]) throw InvalidMatrixError("SparseMatrix: row_ptr not nondecreasing");
        for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (col_idx_[k] < 0 || col_idx_[k] >= n_cols_)
                throw InvalidMatrixError("SparseMatrix: column index out of range");
            if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
                throw InvalidMatrixError("SparseMatrix: column indices not strictly increasing in row");
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(index_t n_rows, index_t n_cols, std::vector<index_t> rows,
                                         std::vector<index_t> cols, std::vector<double> values) {
    if (rows.size() != cols.size() || rows.size() != values.size())
        throw InvalidMatrixError("from_triplets: array lengths differ");
    const size_t nnz_in = values.size();
    for (size_t k = 0; k < nnz_in; ++k) {
        if (rows[k] < 0 || rows[k] >= n_rows || cols[k] < 0 || cols[k] >= n_cols)
            throw InvalidMatrixError("from_triplets: index out of range");
    }
    std::vector<size_t> order(nnz_in);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (rows[a] != rows[b]) return rows[a] < rows[b];
        return cols[a] < cols[b];
    });

    std::vector<index_t> rp(static_cast<size_t>(n_rows) + 1, 0);
    std::vector<index_t> ci;
    std::vector<double> v;
    ci.reserve(nnz_in);
    v.reserve(nnz_in);
    index_t last_row = -1, last_col = -1;
    for (size_t idx : order) {
        if (!ci.empty() && rows[idx] == last_row && cols[idx] == last_col) {
            v.back() += values[idx];  // duplicate entry
        } else {
            rp[static_cast<size_t>(rows[idx]) + 1]++;
            ci.push_back(cols[idx]);
            v.push_back(values[idx]);
            last_row = rows[idx];
            last_col = cols[idx];
        }
    }
    for (size_t i = 1; i < rp.size(); ++i) rp[i] += rp[i - 1];
    return SparseMatrix(n_rows, n_cols, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::identity(index_t n) {
    std::vector<index_t> rp(static_cast<size_t>(n) + 1);
    std::vector<index_t> ci(static_cast<size_t>(n));
    std::vector<double> v(static_cast<size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) rp[static_cast<size_t>(i)] = i;
    for (index_t i = 0; i < n; ++i) ci[static_cast<size_t>(i)] = i;
    return SparseMatrix(n, n, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<index_t> rp(static_cast<size_t>(n_cols_) + 1, 0);
    for (index_t c : col_idx_) rp[static_cast<size_t>(c) + 1]++;
    for (size_t i = 1; i < rp.size(); ++i) rp[i] += rp[i - 1];
    std::vector<index_t> ci(values_.size());
    std::vector<double> v(values_.size());
    std::vector<index_t> next(rp.begin(), rp.end() - 1);
    for (index_t i = 0; i < n_rows_; ++i) {
        for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const index_t pos = next[static_cast<size_t>(col_idx_[k])]++;
            ci[static_cast<size_t>(pos)] = i;
            v[static_cast<size_t>(pos)] = values_[k];
        }
    }
    return SparseMatrix(n_cols_, n_rows_, std::move(rp), std::move(ci), std::move(v));
}

double SparseMatrix::frobenius_norm() const {
    double acc = 0.0;
    for (double x : values_) acc += x * x;
    return std::sqrt(acc);
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
}

bool SparseMatrix::is_symmetric(double tol) const {
    if (n_rows_ != n_cols_) return false;
    const SparseMatrix at = transposed();
    // Merge-walk the rows of A and A^T accumulating ||A - A^T||_F.
    double diff2 = 0.0;
    for (index_t i = 0; i < n_rows_; ++i) {
        index_t ka = row_ptr_[i], kb = at.row_ptr_[i];
        const index_t ea = row_ptr_[i + 1], eb = at.row_ptr_[i + 1];
        while (ka < ea || kb < eb) {
            const index_t ca = ka < ea ? col_idx_[ka] : n_cols_;
            const index_t cb = kb < eb ? at.col_idx_[kb] : n_cols_;
            double d;
            if (ca < cb) {
                d = values_[ka++];
            } else if (cb < ca) {
                d = -at.values_[kb++];
            } else {
                d = values_[ka++] - at.values_[kb++];
            }
            diff2 += d * d;
        }
    }
    return std::sqrt(diff2) <= tol * std::max(frobenius_norm(), 1e-300);
}

namespace {

struct SpmmCtx {
    const SparseMatrix* a;
    const DenseMatrix* x;
    DenseMatrix* y;
};

void spmm_rows(std::ptrdiff_t lo, std::ptrdiff_t hi, void* raw) {
    auto* ctx = static_cast<SpmmCtx*>(raw);
    const SparseMatrix& a = *ctx->a;
    const DenseMatrix& x = *ctx->x;
    DenseMatrix& y = *ctx->y;
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (index_t j = 0; j < x.cols(); ++j) {
        for (index_t i = lo; i < hi; ++i) {
            double acc = 0.0;
            for (index_t k = rp[static_cast<size_t>(i)]; k < rp[static_cast<size_t>(i) + 1]; ++k)
                acc += v[static_cast<size_t>(k)] * x(ci[static_cast<size_t>(k)], j);
            y(i, j) = acc;
        }
    }
}

struct SpmmTCtx {
    const SparseMatrix* a;
    const DenseMatrix* x;
    DenseMatrix* y;
};

void spmmt_cols(std::ptrdiff_t lo, std::ptrdiff_t hi, void* raw) {
    auto* ctx = static_cast<SpmmTCtx*>(raw);
    const SparseMatrix& a = *ctx->a;
    const DenseMatrix& x = *ctx->x;
    DenseMatrix& y = *ctx->y;
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (index_t j = lo; j < hi; ++j) {
        for (index_t i = 0; i < a.rows(); ++i) {
            const double xij = x(i, j);
            if (xij == 0.0) continue;
            for (index_t k = rp[static_cast<size_t>(i)]; k < rp[static_cast<size_t>(i) + 1]; ++k)
                y(ci[static_cast<size_t>(k)], j) += v[static_cast<size_t>(k)] * xij;
        }
    }
}

}  // namespace

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
    if (a.cols() != x.rows()) throw DimensionError("spmm: A.cols != X.rows");
    DenseMatrix y(a.rows(), x.cols());
    SpmmCtx ctx{&a, &x, &y};
    detail::parallel_for_ranges(a.rows(), spmm_rows, &ctx);
    return y;
}

DenseMatrix spmm_transpose(const SparseMatrix& a, const DenseMatrix& x) {
    if (a.rows() != x.rows()) throw DimensionError("spmm_transpose: A.rows != X.rows");
    DenseMatrix y(a.cols(), x.cols());
    SpmmTCtx ctx{&a, &x, &y};
    detail::parallel_for_ranges(x.cols(), spmmt_cols, &ctx);
    return y;
}

DenseMatrix dense_times_sparse(const DenseMatrix& x, const SparseMatrix& b) {
    if (x.cols() != b.rows()) throw DimensionError("dense_times_sparse: X.cols != B.rows");
    DenseMatrix y(x.rows(), b.cols());
    const auto& rp = b.row_ptr();
    const auto& ci = b.col_idx();
    const auto& v = b.values();
    const index_t n = x.rows();
    for (index_t i = 0; i < b.rows(); ++i) {
        const double* xi = x.data() + i * n;
        for (index_t k = rp[static_cast<size_t>(i)]; k < rp[static_cast<size_t>(i) + 1]; ++k) {
            double* yc = y.data() + ci[static_cast<size_t>(k)] * n;
            const double val = v[static_cast<size_t>(k)];
            for (index_t r = 0; r < n; ++r) yc[r] += val * xi[r];
        }
    }
    return y;
}

DenseMatrix to_dense(const SparseMatrix& a) {
    DenseMatrix d(a.rows(), a.cols());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t k = a.row_ptr()[static_cast<size_t>(i)]; k < a.row_ptr()[static_cast<size_t>(i) + 1]; ++k)
            d(i, a.col_idx()[static_cast<size_t>(k)]) = a.values()[static_cast<size_t>(k)];
    return d;
}

}  // namespace sylkrylov
