#include "sylkrylov/low_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sylkrylov/decompositions.hpp"
#include "sylkrylov/errors.hpp"

namespace sylkrylov {

namespace {

DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    if (a.rows() != b.rows()) throw DimensionError("hstack: row counts differ");
    DenseMatrix out(a.rows(), a.cols() + b.cols());
    for (index_t j = 0; j < a.cols(); ++j)
        for (index_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, j);
    for (index_t j = 0; j < b.cols(); ++j)
        for (index_t i = 0; i < b.rows(); ++i) out(i, a.cols() + j) = b(i, j);
    return out;
}

DenseMatrix blkdiag(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
    for (index_t j = 0; j < a.cols(); ++j)
        for (index_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, j);
    for (index_t j = 0; j < b.cols(); ++j)
        for (index_t i = 0; i < b.rows(); ++i) out(a.rows() + i, a.cols() + j) = b(i, j);
    return out;
}

}  // namespace

LowRankMatrix LowRankMatrix::zero(index_t n, index_t m) {
    return {DenseMatrix(n, 0), DenseMatrix(0, 0), DenseMatrix(m, 0), true, true};
}

LowRankMatrix LowRankMatrix::outer(const DenseMatrix& c1, const DenseMatrix& c2) {
    if (c1.cols() != c2.cols()) throw DimensionError("LowRankMatrix::outer: column counts differ");
    return {c1, DenseMatrix::identity(c1.cols()), c2, false, false};
}

SymmetricLowRankMatrix SymmetricLowRankMatrix::zero(index_t n) {
    return {DenseMatrix(n, 0), DenseMatrix(0, 0)};
}

SymmetricLowRankMatrix SymmetricLowRankMatrix::outer(const DenseMatrix& c1) {
    return {c1, DenseMatrix::identity(c1.cols())};
}

LowRankMatrix lr_add(const LowRankMatrix& a, double alpha, const LowRankMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("lr_add: shapes differ");
    return {hstack(a.U, b.U), blkdiag(a.S, alpha * b.S), hstack(a.V, b.V), false, false};
}

SymmetricLowRankMatrix slr_add(const SymmetricLowRankMatrix& a, double alpha,
                               const SymmetricLowRankMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("slr_add: shapes differ");
    return {hstack(a.Z, b.Z), blkdiag(a.D, alpha * b.D)};
}

LowRankMatrix lr_scale(double alpha, const LowRankMatrix& m) {
    return {m.U, alpha * m.S, m.V, m.u_orthonormal, m.v_orthonormal};
}

SymmetricLowRankMatrix slr_scale(double alpha, const SymmetricLowRankMatrix& m) {
    return {m.Z, alpha * m.D};
}

LowRankMatrix lr_sylvester_op(const SparseMatrix& a, const SparseMatrix& b, const LowRankMatrix& m) {
    // A U S V^T + U S (B^T V)^T = [A U, U] diag(S, S) [V, B^T V]^T
    DenseMatrix au = spmm(a, m.U);
    DenseMatrix btv = spmm_transpose(b, m.V);
    return {hstack(au, m.U), blkdiag(m.S, m.S), hstack(m.V, btv), false, false};
}

SymmetricLowRankMatrix slr_lyapunov_op(const SparseMatrix& a, const SymmetricLowRankMatrix& m) {
    // (A Z) D Z^T + Z D (A Z)^T = [Z, A Z] [[O, D]; [D, O]] [Z, A Z]^T
    DenseMatrix az = spmm(a, m.Z);
    const index_t r = m.rank();
    DenseMatrix core(2 * r, 2 * r);
    for (index_t j = 0; j < r; ++j)
        for (index_t i = 0; i < r; ++i) {
            core(i, r + j) = m.D(i, j);
            core(r + i, j) = m.D(i, j);
        }
    return {hstack(m.Z, az), std::move(core)};
}

double lr_inner(const LowRankMatrix& a, const LowRankMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("lr_inner: shapes differ");
    if (a.rank() == 0 || b.rank() == 0) return 0.0;
    DenseMatrix uu = matmul_at_b(a.U, b.U);   // r_a x r_b
    DenseMatrix vv = matmul_at_b(b.V, a.V);   // r_b x r_a
    DenseMatrix left = matmul_at_b(a.S, uu);  // S_a^T (U_a^T U_b)
    DenseMatrix right = matmul(b.S, vv);      // S_b (V_b^T V_a)
    // tr(left * right)
    double tr = 0.0;
    for (index_t i = 0; i < left.rows(); ++i)
        for (index_t k = 0; k < left.cols(); ++k) tr += left(i, k) * right(k, i);
    return tr;
}

double slr_inner(const SymmetricLowRankMatrix& a, const SymmetricLowRankMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("slr_inner: shapes differ");
    if (a.rank() == 0 || b.rank() == 0) return 0.0;
    DenseMatrix zz = matmul_at_b(a.Z, b.Z);  // r_a x r_b
    DenseMatrix left = matmul(a.D, zz);      // D_a (Z_a^T Z_b)
    DenseMatrix right = matmul_a_bt(b.D, zz);  // D_b (Z_b^T Z_a)
    double tr = 0.0;
    for (index_t i = 0; i < left.rows(); ++i)
        for (index_t k = 0; k < left.cols(); ++k) tr += left(i, k) * right(k, i);
    return tr;
}

double lr_norm(const LowRankMatrix& m) { return std::sqrt(std::max(0.0, lr_inner(m, m))); }

double slr_norm(const SymmetricLowRankMatrix& m) { return std::sqrt(std::max(0.0, slr_inner(m, m))); }

DenseMatrix lr_to_dense(const LowRankMatrix& m) {
    if (m.rank() == 0) return DenseMatrix(m.rows(), m.cols());
    return matmul_a_bt(matmul(m.U, m.S), m.V);
}

DenseMatrix slr_to_dense(const SymmetricLowRankMatrix& m) {
    if (m.rank() == 0) return DenseMatrix(m.rows(), m.rows());
    return matmul_a_bt(matmul(m.Z, m.D), m.Z);
}

LowRankMatrix truncate(const LowRankMatrix& m, double eps_t, std::optional<index_t> max_rank) {
    if (eps_t < 0.0) throw std::invalid_argument("truncate: eps_t must be >= 0");
    if (m.rank() == 0) return m;
    const QrResult qu = compact_qr(m.U);
    const QrResult qv = compact_qr(m.V);
    DenseMatrix core = matmul_a_bt(matmul(qu.r, m.S), qv.r);
    const SvdResult dec = svd(core);

    const double sigma1 = dec.singular_values.empty() ? 0.0 : dec.singular_values.front();
    index_t keep = 0;
    const index_t limit =
        max_rank ? std::min<index_t>(*max_rank, static_cast<index_t>(dec.singular_values.size()))
                 : static_cast<index_t>(dec.singular_values.size());
    while (keep < limit && dec.singular_values[static_cast<size_t>(keep)] > 0.0 &&
           dec.singular_values[static_cast<size_t>(keep)] >= eps_t * sigma1)
        ++keep;

    LowRankMatrix out;
    out.U = matmul(qu.q, dec.u.top_left(dec.u.rows(), keep));
    out.V = matmul(qv.q, dec.v.top_left(dec.v.rows(), keep));
    out.S = DenseMatrix(keep, keep);
    for (index_t i = 0; i < keep; ++i) out.S(i, i) = dec.singular_values[static_cast<size_t>(i)];
    out.u_orthonormal = true;
    out.v_orthonormal = true;
    return out;
}

SymmetricLowRankMatrix symmetric_truncate(const SymmetricLowRankMatrix& m, double eps_t,
                                          std::optional<index_t> max_rank) {
    if (eps_t < 0.0) throw std::invalid_argument("symmetric_truncate: eps_t must be >= 0");
    if (m.rank() == 0) return m;
    const QrResult qz = compact_qr(m.Z);
    DenseMatrix core = matmul_a_bt(matmul(qz.r, m.D), qz.r);
    // Symmetrize against rounding before the eigendecomposition.
    for (index_t j = 0; j < core.cols(); ++j)
        for (index_t i = 0; i < j; ++i) {
            const double v = 0.5 * (core(i, j) + core(j, i));
            core(i, j) = v;
            core(j, i) = v;
        }
    const SymmetricEigResult eig = symmetric_eig(core);

    const index_t r = core.rows();
    std::vector<index_t> order(static_cast<size_t>(r));
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        return std::abs(eig.eigenvalues[static_cast<size_t>(a)]) >
               std::abs(eig.eigenvalues[static_cast<size_t>(b)]);
    });

    const double lmax = std::abs(eig.eigenvalues[static_cast<size_t>(order[0])]);
    index_t keep = 0;
    const index_t limit = max_rank ? std::min<index_t>(*max_rank, r) : r;
    while (keep < limit) {
        const double lv = std::abs(eig.eigenvalues[static_cast<size_t>(order[static_cast<size_t>(keep)])]);
        if (lv == 0.0 || lv < eps_t * lmax) break;
        ++keep;
    }

    DenseMatrix e_keep(r, keep);
    DenseMatrix d(keep, keep);
    for (index_t c = 0; c < keep; ++c) {
        const index_t src = order[static_cast<size_t>(c)];
        for (index_t i = 0; i < r; ++i) e_keep(i, c) = eig.vectors(i, src);
        d(c, c) = eig.eigenvalues[static_cast<size_t>(src)];
    }
    return {matmul(qz.q, e_keep), std::move(d)};
}

}  // namespace sylkrylov
