#include "sylkrylov/block_krylov.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstring>
#include <tuple>

#include "sylkrylov/decompositions.hpp"
#include "sylkrylov/errors.hpp"

namespace sylkrylov {

namespace {

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using Map = Eigen::Map<Eigen::MatrixXd>;

/// Singular values of a small matrix, largest and smallest.
std::pair<double, double> extreme_singular_values(const DenseMatrix& m) {
    const SvdResult dec = svd(m);
    if (dec.singular_values.empty()) return {0.0, 0.0};
    return {dec.singular_values.front(), dec.singular_values.back()};
}

}  // namespace

std::pair<BlockKrylovBasis, DenseMatrix> BlockKrylovBasis::init(const SparseMatrix& op,
                                                                const DenseMatrix& start_block,
                                                                KrylovMode mode, bool transpose_op,
                                                                BasisOptions opts) {
    if (op.rows() != op.cols()) throw DimensionError("basis init: operator must be square");
    if (start_block.rows() != op.rows())
        throw DimensionError("basis init: start block rows must match operator dimension");
    if (start_block.cols() < 1 || start_block.cols() > start_block.rows())
        throw DimensionError("basis init: block size must be in [1, n]");

    QrResult qr = thin_qr(start_block);
    const auto [smax, smin] = extreme_singular_values(qr.r);
    if (smin < 1e-12 * smax || smax == 0.0)
        throw RankDeficientStartError("basis init: start block is numerically rank deficient");

    BlockKrylovBasis b;
    b.op_ = &op;
    b.transpose_op_ = transpose_op;
    b.mode_ = mode;
    b.opts_ = opts;
    b.n_ = op.rows();
    b.s_ = start_block.cols();
    b.v_data_.reserve(static_cast<size_t>(b.n_ * b.s_ * 8));
    b.append_block(qr.q);
    return {std::move(b), std::move(qr.r)};
}

DenseMatrix BlockKrylovBasis::apply_operator(const DenseMatrix& x) const {
    return transpose_op_ ? spmm_transpose(*op_, x) : spmm(*op_, x);
}

void BlockKrylovBasis::append_block(const DenseMatrix& q) {
    v_data_.insert(v_data_.end(), q.data(), q.data() + q.values().size());
    ++v_blocks_;
}

BlockKrylovBasis::ExtendStatus BlockKrylovBasis::try_extend() {
    if (broken_) throw BreakdownError("basis extend: basis already broke down");
    if (exhausted_) return ExtendStatus::exhausted;

    const index_t k = v_blocks_;  // blocks before this step
    DenseMatrix last(n_, s_);
    std::memcpy(last.data(), v_data_.data() + static_cast<size_t>((k - 1) * s_ * n_),
                static_cast<size_t>(n_ * s_) * sizeof(double));
    DenseMatrix w = apply_operator(last);

    DenseMatrix h_col((k + 1) * s_, s_);
    Map wm(w.data(), n_, s_);

    const index_t first_block = (mode_ == KrylovMode::lanczos) ? std::max<index_t>(0, k - 2) : 0;

    // Block modified Gram-Schmidt against previous blocks.
    for (index_t jb = first_block; jb < k; ++jb) {
        ConstMap vj(v_data_.data() + static_cast<size_t>(jb * s_ * n_), n_, s_);
        Eigen::MatrixXd c = vj.transpose() * wm;
        wm.noalias() -= vj * c;
        Map(h_col.data(), h_col.rows(), s_).block(jb * s_, 0, s_, s_) = c;
    }
    // Second pass. Arnoldi folds the corrections into H; Lanczos (optional
    // full reorthogonalization) does not, keeping H block tridiagonal.
    if (mode_ == KrylovMode::arnoldi) {
        for (index_t jb = 0; jb < k; ++jb) {
            ConstMap vj(v_data_.data() + static_cast<size_t>(jb * s_ * n_), n_, s_);
            Eigen::MatrixXd c = vj.transpose() * wm;
            wm.noalias() -= vj * c;
            Map(h_col.data(), h_col.rows(), s_).block(jb * s_, 0, s_, s_) += c;
        }
    } else if (opts_.lanczos_full_reorth) {
        for (index_t jb = 0; jb < k; ++jb) {
            ConstMap vj(v_data_.data() + static_cast<size_t>(jb * s_ * n_), n_, s_);
            Eigen::MatrixXd c = vj.transpose() * wm;
            wm.noalias() -= vj * c;
        }
    }

    QrResult qr = thin_qr(w);
    auto [smax, smin] = extreme_singular_values(qr.r);

    double coeff2 = 0.0;
    for (index_t jb = first_block; jb < k; ++jb)
        for (index_t c = 0; c < s_; ++c)
            for (index_t r = jb * s_; r < (jb + 1) * s_; ++r) coeff2 += h_col(r, c) * h_col(r, c);
    double r2 = 0.0;
    for (double v : qr.r.values()) r2 += v * v;
    const double scale = std::sqrt(h_fro2_ + coeff2 + r2);

    if (mode_ == KrylovMode::lanczos && smin < opts_.breakdown_tol * scale) {
        // The local two-block orthogonalization leaves drift-sized components
        // along older blocks; clean them off before classifying a deficient
        // candidate as exhaustion or hard breakdown. Not recorded in H.
        for (index_t jb = 0; jb < k; ++jb) {
            ConstMap vj(v_data_.data() + static_cast<size_t>(jb * s_ * n_), n_, s_);
            Eigen::MatrixXd c = vj.transpose() * wm;
            wm.noalias() -= vj * c;
        }
        qr = thin_qr(w);
        std::tie(smax, smin) = extreme_singular_values(qr.r);
    }

    if (smax <= opts_.breakdown_tol * scale || scale == 0.0) {
        // Whole candidate block annihilated: span(V) is op-invariant.
        DenseMatrix square_col = h_col.top_left(k * s_, s_);
        h_fro2_ += coeff2;
        h_cols_.push_back(std::move(square_col));
        exhausted_ = true;
        return ExtendStatus::exhausted;
    }
    if (smin < opts_.breakdown_tol * scale) {
        broken_ = true;
        throw BreakdownError("basis extend: candidate block is rank deficient (no deflation)");
    }

    Map(h_col.data(), h_col.rows(), s_).block(k * s_, 0, s_, s_) =
        ConstMap(qr.r.data(), s_, s_);
    h_fro2_ += coeff2 + r2;
    h_cols_.push_back(std::move(h_col));
    append_block(qr.q);
    return ExtendStatus::grown;
}

void BlockKrylovBasis::extend() {
    if (try_extend() == ExtendStatus::exhausted)
        throw BreakdownError("basis extend: Krylov subspace is invariant (exhausted)", true);
}

DenseMatrix BlockKrylovBasis::basis_prefix(index_t cols) const {
    if (cols < 0 || cols > this->cols()) throw DimensionError("basis_prefix: column count out of range");
    DenseMatrix out(n_, cols);
    std::memcpy(out.data(), v_data_.data(), static_cast<size_t>(n_ * cols) * sizeof(double));
    return out;
}

DenseMatrix BlockKrylovBasis::hessenberg_top_left(index_t rows, index_t cols) const {
    if (rows > this->cols() || cols > s_ * steps())
        throw DimensionError("hessenberg_top_left: block exceeds recurrence matrix");
    DenseMatrix h(rows, cols);
    for (index_t e = 0; e * s_ < cols; ++e) {
        const DenseMatrix& blk = h_cols_[static_cast<size_t>(e)];
        const index_t rmax = std::min(rows, blk.rows());
        const index_t cmax = std::min(cols - e * s_, s_);
        for (index_t c = 0; c < cmax; ++c)
            for (index_t r = 0; r < rmax; ++r) h(r, e * s_ + c) = blk(r, c);
    }
    return h;
}

void BlockKrylovBasis::accumulate_h_times(const DenseMatrix& p, DenseMatrix& c) const {
    if (p.rows() % s_ != 0 || p.rows() > s_ * steps())
        throw DimensionError("accumulate_h_times: p rows incompatible with H");
    if (c.cols() < p.cols() || c.rows() > cols())
        throw DimensionError("accumulate_h_times: bad output shape");
    ConstMap pm(p.data(), p.rows(), p.cols());
    // [H p, O]: only the leading p.cols() columns receive contributions.
    Map cm(c.data(), c.rows(), c.cols());
    auto target = cm.leftCols(p.cols());
    const index_t jblocks = p.rows() / s_;
    for (index_t jb = 0; jb < jblocks; ++jb) {
        const DenseMatrix& blk = h_cols_[static_cast<size_t>(jb)];
        const index_t r0 = (mode_ == KrylovMode::lanczos) ? std::max<index_t>(0, (jb - 1) * s_) : 0;
        const index_t r1 = std::min(blk.rows(), c.rows());
        if (r1 <= r0) continue;
        ConstMap hb(blk.data(), blk.rows(), s_);
        target.middleRows(r0, r1 - r0).noalias() +=
            hb.middleRows(r0, r1 - r0) * pm.middleRows(jb * s_, s_);
    }
}

void BlockKrylovBasis::accumulate_times_ht(const DenseMatrix& p, DenseMatrix& c) const {
    if (p.cols() % s_ != 0 || p.cols() > s_ * steps())
        throw DimensionError("accumulate_times_ht: p cols incompatible with H");
    if (c.rows() < p.rows() || c.cols() > cols())
        throw DimensionError("accumulate_times_ht: bad output shape");
    ConstMap pm(p.data(), p.rows(), p.cols());
    // [p H^T; O]: only the leading p.rows() rows receive contributions.
    Map cm(c.data(), c.rows(), c.cols());
    auto target = cm.topRows(p.rows());
    const index_t jblocks = p.cols() / s_;
    for (index_t jb = 0; jb < jblocks; ++jb) {
        const DenseMatrix& blk = h_cols_[static_cast<size_t>(jb)];
        const index_t r0 = (mode_ == KrylovMode::lanczos) ? std::max<index_t>(0, (jb - 1) * s_) : 0;
        const index_t r1 = std::min(blk.rows(), c.cols());
        if (r1 <= r0) continue;
        ConstMap hb(blk.data(), blk.rows(), s_);
        target.middleCols(r0, r1 - r0).noalias() +=
            pm.middleCols(jb * s_, s_) * hb.middleRows(r0, r1 - r0).transpose();
    }
}

}  // namespace sylkrylov
