#pragma once

#include <vector>

#include "sylkrylov/dense_matrix.hpp"
#include "sylkrylov/sparse_matrix.hpp"

namespace sylkrylov {

enum class KrylovMode { arnoldi, lanczos };

struct BasisOptions {
    double breakdown_tol = 1e-12;
    /// Lanczos normally orthogonalizes against the previous two blocks only.
    /// This adds a full pass against all blocks (coefficients are not folded
    /// into H, so H stays block tridiagonal).
    bool lanczos_full_reorth = false;
};

/// Incrementally built block Krylov basis with recurrence
///   op * V_k = V_{k+1} * H_{k+1,k}
/// where op is the operator or its transpose per the transpose flag, V is
/// column-orthonormal and H is block upper Hessenberg (block tridiagonal in
/// lanczos mode).
///
/// A step that annihilates the whole candidate block means the span of V is
/// op-invariant; the basis is then marked exhausted, H's last block column is
/// square, and the recurrence op*V = V*H holds with no growth. A step whose
/// candidate block is only partially rank deficient raises BreakdownError
/// (deflation is not implemented).
class BlockKrylovBasis {
public:
    enum class ExtendStatus { grown, exhausted };

    /// QR-initializes the basis from a full-column-rank start block and
    /// returns the triangular factor of the start block.
    /// Raises RankDeficientStartError when the smallest singular value of the
    /// start block is below 1e-12 times the largest.
    static std::pair<BlockKrylovBasis, DenseMatrix> init(const SparseMatrix& op,
                                                         const DenseMatrix& start_block,
                                                         KrylovMode mode, bool transpose_op,
                                                         BasisOptions opts = {});

    /// One block Arnoldi / Lanczos step. Returns exhausted on clean
    /// invariant-subspace annihilation; throws BreakdownError on partial rank
    /// deficiency. After exhaustion further calls return exhausted.
    ExtendStatus try_extend();

    /// As try_extend, but treats exhaustion as an error too (the basis stays
    /// valid at its current step either way).
    void extend();

    index_t block_size() const { return s_; }
    /// Completed extension steps.
    index_t steps() const { return static_cast<index_t>(h_cols_.size()); }
    /// Number of orthonormal blocks currently in V.
    index_t blocks() const { return v_blocks_; }
    index_t cols() const { return v_blocks_ * s_; }
    index_t dim() const { return n_; }
    bool exhausted() const { return exhausted_; }
    KrylovMode mode() const { return mode_; }

    /// Copy of V(:, 0:cols).
    DenseMatrix basis_prefix(index_t cols) const;
    DenseMatrix basis_matrix() const { return basis_prefix(cols()); }

    /// Copy of the leading rows x cols block of the recurrence matrix H.
    /// The full H has s*steps() columns and cols() rows.
    DenseMatrix hessenberg_top_left(index_t rows, index_t cols) const;
    DenseMatrix hessenberg() const { return hessenberg_top_left(cols(), s_ * steps()); }

    /// c += H(1:c.rows, 1:p.rows) * p, exploiting the block band structure.
    void accumulate_h_times(const DenseMatrix& p, DenseMatrix& c) const;
    /// c += p * H(1:c.cols, 1:p.cols)^T, exploiting the block band structure.
    void accumulate_times_ht(const DenseMatrix& p, DenseMatrix& c) const;

private:
    BlockKrylovBasis() = default;

    DenseMatrix apply_operator(const DenseMatrix& x) const;
    void append_block(const DenseMatrix& q);

    const SparseMatrix* op_ = nullptr;
    bool transpose_op_ = false;
    KrylovMode mode_ = KrylovMode::arnoldi;
    BasisOptions opts_;

    index_t n_ = 0;
    index_t s_ = 0;
    index_t v_blocks_ = 0;
    std::vector<double> v_data_;  // n_ x (v_blocks_*s_), column-major

    /// h_cols_[e] is block column e of H: rows (e+2)*s normally, (e+1)*s for
    /// the final exhausted column.
    std::vector<DenseMatrix> h_cols_;
    double h_fro2_ = 0.0;  // running squared Frobenius norm of H

    bool exhausted_ = false;
    bool broken_ = false;
};

}  // namespace sylkrylov
