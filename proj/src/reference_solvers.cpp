#include "sylkrylov/reference_solvers.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sylkrylov/errors.hpp"

namespace sylkrylov {

namespace {

void require_sylvester_dims(const SparseMatrix& a, const SparseMatrix& b, index_t c_rows,
                            index_t c_cols) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw DimensionError("solver: A and B must be square");
    if (c_rows != a.rows() || c_cols != b.rows())
        throw DimensionError("solver: right-hand side shape must be n x m");
}

DenseMatrix sylvester_apply(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& x) {
    DenseMatrix y = spmm(a, x);
    DenseMatrix xb = dense_times_sparse(x, b);
    axpy(1.0, xb, y);
    return y;
}

}  // namespace

DenseSolution matrix_oriented_cg(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c,
                                 const SolverConfig& cfg) {
    if (static_cast<double>(a.rows()) * static_cast<double>(b.rows()) > 4e8)
        throw DimensionError("matrix_oriented_cg: dense iterates over 4e8 entries refused");
    require_sylvester_dims(a, b, c.rows(), c.cols());
    const index_t max_iter = resolve_max_iter(cfg, a.rows(), b.rows());

    DenseSolution sol;
    double total = 0.0;
    StopWatch total_watch(total);

    IterationRecord rec0;
    DenseMatrix x, r, p;
    double rho, norm_r0;
    {
        StopWatch t(rec0.t_basic_s);
        x = DenseMatrix(c.rows(), c.cols());
        r = c;  // X0 = 0
        p = r;
        rho = frobenius_inner(r, r);
        norm_r0 = std::sqrt(rho);
    }
    rec0.rel_residual = 1.0;
    sol.history.records.push_back(rec0);

    for (index_t k = 0; k < max_iter; ++k) {
        IterationRecord rec;
        rec.iteration = k + 1;
        rec.rel_residual = sol.history.records.back().rel_residual;
        StopWatch t(rec.t_basic_s);

        DenseMatrix q = sylvester_apply(a, b, p);
        const double denom = frobenius_inner(r, q);
        if (std::abs(denom) < cfg.breakdown_tol * rho) {
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double alpha = rho / denom;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);

        const double norm_r = frobenius_norm(r);
        rec.rel_residual = norm_r / norm_r0;
        if (norm_r <= norm_r0 * cfg.eps_tol) {
            sol.status = SolveStatus::converged;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double rho_next = frobenius_inner(r, r);
        const double beta = rho_next / rho;
        DenseMatrix p_next = r;
        axpy(beta, p, p_next);
        p = std::move(p_next);
        rho = rho_next;
        t.stop();
        sol.history.records.push_back(rec);
    }

    sol.X = std::move(x);
    total_watch.stop();
    sol.history.total_time_s = total;
    return sol;
}

DenseSolution matrix_oriented_bicgstab(const SparseMatrix& a, const SparseMatrix& b,
                                       const DenseMatrix& c, const SolverConfig& cfg) {
    if (static_cast<double>(a.rows()) * static_cast<double>(b.rows()) > 4e8)
        throw DimensionError("matrix_oriented_bicgstab: dense iterates over 4e8 entries refused");
    require_sylvester_dims(a, b, c.rows(), c.cols());
    const index_t max_iter = resolve_max_iter(cfg, a.rows(), b.rows());

    DenseSolution sol;
    double total = 0.0;
    StopWatch total_watch(total);

    IterationRecord rec0;
    DenseMatrix x, r, r_shadow, p;
    double rho, norm_r0, norm_shadow;
    {
        StopWatch t(rec0.t_basic_s);
        x = DenseMatrix(c.rows(), c.cols());
        r = c;
        r_shadow = r;
        p = r;
        rho = frobenius_inner(r, r_shadow);
        norm_r0 = std::sqrt(frobenius_inner(r, r));
        norm_shadow = norm_r0;
    }
    rec0.rel_residual = 1.0;
    sol.history.records.push_back(rec0);

    for (index_t k = 0; k < max_iter; ++k) {
        IterationRecord rec;
        rec.iteration = k + 1;
        rec.rel_residual = sol.history.records.back().rel_residual;
        StopWatch t(rec.t_basic_s);

        DenseMatrix q = sylvester_apply(a, b, p);
        // Angle-based guards; raw magnitudes shrink with the residual.
        const double denom = frobenius_inner(r_shadow, q);
        if (std::abs(denom) < cfg.breakdown_tol * norm_shadow * frobenius_norm(q)) {
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double alpha = rho / denom;
        DenseMatrix s_mat = r;
        axpy(-alpha, q, s_mat);

        DenseMatrix t_mat = sylvester_apply(a, b, s_mat);
        const double tt = frobenius_inner(t_mat, t_mat);
        const double ss = frobenius_inner(s_mat, s_mat);
        double omega;
        if (std::sqrt(ss) <= cfg.eps_tol * norm_r0) {
            // Converged at the half step; omega = 0 finishes the update.
            omega = 0.0;
        } else if (tt < cfg.breakdown_tol * ss) {
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        } else {
            omega = frobenius_inner(t_mat, s_mat) / tt;
        }

        axpy(alpha, p, x);
        axpy(omega, s_mat, x);
        r = s_mat;
        axpy(-omega, t_mat, r);

        const double norm_r = frobenius_norm(r);
        rec.rel_residual = norm_r / norm_r0;
        if (norm_r <= norm_r0 * cfg.eps_tol) {
            sol.status = SolveStatus::converged;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double rho_next = frobenius_inner(r, r_shadow);
        if (std::abs(rho_next) < cfg.breakdown_tol * norm_shadow * frobenius_norm(r)) {
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double beta = (alpha / omega) * (rho_next / rho);
        DenseMatrix p_next = r;
        axpy(beta, p, p_next);
        axpy(-beta * omega, q, p_next);
        p = std::move(p_next);
        rho = rho_next;
        t.stop();
        sol.history.records.push_back(rec);
    }

    sol.X = std::move(x);
    total_watch.stop();
    sol.history.total_time_s = total;
    return sol;
}

SymmetricLowRankSolution truncated_cg(const SparseMatrix& a, const DenseMatrix& c1,
                                      const SolverConfig& cfg, double eps_t,
                                      const TruncatedCgOptions& opts) {
    if (a.rows() != a.cols()) throw DimensionError("truncated_cg: A must be square");
    if (c1.rows() != a.rows()) throw DimensionError("truncated_cg: C1 rows must match A");
    if (!a.is_symmetric(1e-12)) throw InvalidMatrixError("truncated_cg: A is not symmetric");
    if (eps_t < 0.0) throw std::invalid_argument("truncated_cg: eps_t must be >= 0");
    const index_t max_iter = resolve_max_iter(cfg, a.rows(), a.rows());

    SymmetricLowRankSolution sol;
    double total = 0.0;
    StopWatch total_watch(total);

    IterationRecord rec0;
    SymmetricLowRankMatrix x = SymmetricLowRankMatrix::zero(a.rows());
    SymmetricLowRankMatrix rhs = SymmetricLowRankMatrix::outer(c1);
    SymmetricLowRankMatrix r = rhs, p = rhs;
    double norm_r0;
    {
        StopWatch t(rec0.t_basic_s);
        norm_r0 = slr_norm(r);
    }
    rec0.rel_residual = 1.0;
    sol.history.records.push_back(rec0);

    for (index_t k = 0; k < max_iter; ++k) {
        IterationRecord rec;
        rec.iteration = k + 1;
        rec.rel_residual = sol.history.records.back().rel_residual;
        double basic = 0.0, trunc = 0.0;
        {
            StopWatch tb(basic);

            SymmetricLowRankMatrix q = slr_lyapunov_op(a, p);
            if (opts.truncate_q) {
                StopWatch tt(trunc);
                q = symmetric_truncate(q, eps_t);
            }
            const double xi = slr_inner(p, q);
            if (std::abs(xi) < cfg.breakdown_tol * slr_inner(p, p)) {
                sol.status = SolveStatus::breakdown;
            } else {
                const double alpha = slr_inner(r, p) / xi;

                x = slr_add(x, alpha, p);
                {
                    StopWatch tt(trunc);
                    x = symmetric_truncate(x, eps_t);
                }

                // R_{k+1} = C1 C1^T - A X - X A^T, recomputed explicitly.
                r = slr_add(rhs, -1.0, slr_lyapunov_op(a, x));
                if (opts.truncate_r) {
                    StopWatch tt(trunc);
                    r = symmetric_truncate(r, eps_t);
                }

                const double norm_r = slr_norm(r);
                rec.rel_residual = norm_r / norm_r0;
                if (norm_r <= norm_r0 * cfg.eps_tol) {
                    sol.status = SolveStatus::converged;
                } else {
                    const double beta = -slr_inner(r, q) / xi;
                    p = slr_add(r, beta, p);
                    {
                        StopWatch tt(trunc);
                        p = symmetric_truncate(p, eps_t);
                    }
                }
            }
        }
        rec.t_basic_s = basic - trunc;
        rec.t_trunc_s = trunc;
        sol.history.records.push_back(rec);
        if (sol.status != SolveStatus::max_iter) break;
    }

    sol.X = std::move(x);
    total_watch.stop();
    sol.history.total_time_s = total;
    return sol;
}

LowRankSolution truncated_bicgstab(const SparseMatrix& a, const SparseMatrix& b,
                                   const DenseMatrix& c1, const DenseMatrix& c2,
                                   const SolverConfig& cfg, double eps_t,
                                   const TruncatedBicgstabOptions& opts) {
    require_sylvester_dims(a, b, c1.rows(), c2.rows());
    if (c1.cols() != c2.cols()) throw DimensionError("truncated_bicgstab: C1/C2 column counts differ");
    if (eps_t < 0.0) throw std::invalid_argument("truncated_bicgstab: eps_t must be >= 0");
    const index_t max_iter = resolve_max_iter(cfg, a.rows(), b.rows());

    LowRankSolution sol;
    double total = 0.0;
    StopWatch total_watch(total);

    IterationRecord rec0;
    LowRankMatrix x = LowRankMatrix::zero(a.rows(), b.rows());
    LowRankMatrix rhs = LowRankMatrix::outer(c1, c2);
    LowRankMatrix r = rhs;
    const LowRankMatrix r_shadow = rhs;  // rank s, never truncated
    LowRankMatrix p = rhs;
    double rho, norm_r0, norm_shadow;
    {
        StopWatch t(rec0.t_basic_s);
        rho = lr_inner(r, r_shadow);
        norm_r0 = lr_norm(r);
        norm_shadow = norm_r0;
    }
    rec0.rel_residual = 1.0;
    sol.history.records.push_back(rec0);

    for (index_t k = 0; k < max_iter; ++k) {
        IterationRecord rec;
        rec.iteration = k + 1;
        rec.rel_residual = sol.history.records.back().rel_residual;
        double basic = 0.0, trunc = 0.0;
        {
            StopWatch tb(basic);

            LowRankMatrix q = lr_sylvester_op(a, b, p);
            if (opts.truncate_q) {
                StopWatch tt(trunc);
                q = truncate(q, eps_t);
            }
            const double denom = lr_inner(r_shadow, q);
            if (std::abs(denom) < cfg.breakdown_tol * norm_shadow * lr_norm(q)) {
                sol.status = SolveStatus::breakdown;
            } else {
                const double alpha = rho / denom;
                LowRankMatrix s_mat = lr_add(r, -alpha, q);
                if (opts.truncate_s) {
                    StopWatch tt(trunc);
                    s_mat = truncate(s_mat, eps_t);
                }

                LowRankMatrix t_mat = lr_sylvester_op(a, b, s_mat);
                if (opts.truncate_t) {
                    StopWatch tt(trunc);
                    t_mat = truncate(t_mat, eps_t);
                }
                const double tt_inner = lr_inner(t_mat, t_mat);
                const double ss_inner = lr_inner(s_mat, s_mat);
                const bool half_step_converged = std::sqrt(ss_inner) <= cfg.eps_tol * norm_r0;
                if (tt_inner < cfg.breakdown_tol * ss_inner && !half_step_converged) {
                    sol.status = SolveStatus::breakdown;
                } else {
                    const double omega = half_step_converged ? 0.0 : lr_inner(t_mat, s_mat) / tt_inner;

                    x = lr_add(lr_add(x, alpha, p), omega, s_mat);
                    {
                        StopWatch tt(trunc);
                        x = truncate(x, eps_t);
                    }

                    if (opts.residual_variant == ResidualVariant::recursion) {
                        r = lr_add(s_mat, -omega, t_mat);
                    } else {
                        r = lr_add(rhs, -1.0, lr_sylvester_op(a, b, x));
                    }
                    {
                        StopWatch tt(trunc);
                        r = truncate(r, eps_t);
                    }

                    const double norm_r = lr_norm(r);
                    rec.rel_residual = norm_r / norm_r0;
                    if (norm_r <= norm_r0 * cfg.eps_tol) {
                        sol.status = SolveStatus::converged;
                    } else {
                        const double rho_next = lr_inner(r_shadow, r);
                        if (std::abs(rho_next) < cfg.breakdown_tol * norm_shadow * lr_norm(r)) {
                            sol.status = SolveStatus::breakdown;
                        } else {
                            const double beta = (alpha / omega) * (rho_next / rho);
                            p = lr_add(lr_add(r, beta, p), -beta * omega, q);
                            {
                                StopWatch tt(trunc);
                                p = truncate(p, eps_t);
                            }
                            rho = rho_next;
                        }
                    }
                }
            }
        }
        rec.t_basic_s = basic - trunc;
        rec.t_trunc_s = trunc;
        sol.history.records.push_back(rec);
        if (sol.status != SolveStatus::max_iter) break;
    }

    sol.X = std::move(x);
    total_watch.stop();
    sol.history.total_time_s = total;
    return sol;
}

DenseMatrix kron_solve(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                       const DenseMatrix& c2) {
    require_sylvester_dims(a, b, c1.rows(), c2.rows());
    if (c1.cols() != c2.cols()) throw DimensionError("kron_solve: C1/C2 column counts differ");
    const index_t n = a.rows(), m = b.rows();
    if (static_cast<double>(n) * static_cast<double>(m) > 40000)
        throw DimensionError("kron_solve: n*m exceeds the dense direct solve guard (40000)");

    const index_t nm = n * m;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(nm, nm);
    // I_m (x) A: copies of A along the block diagonal.
    for (index_t blk = 0; blk < m; ++blk)
        for (index_t i = 0; i < n; ++i)
            for (index_t k = a.row_ptr()[static_cast<size_t>(i)];
                 k < a.row_ptr()[static_cast<size_t>(i) + 1]; ++k)
                f(blk * n + i, blk * n + a.col_idx()[static_cast<size_t>(k)]) +=
                    a.values()[static_cast<size_t>(k)];
    // B^T (x) I_n: entry (B^T)_{jl} = B_{lj} broadcast on identity blocks.
    for (index_t l = 0; l < m; ++l)
        for (index_t k = b.row_ptr()[static_cast<size_t>(l)];
             k < b.row_ptr()[static_cast<size_t>(l) + 1]; ++k) {
            const index_t j = b.col_idx()[static_cast<size_t>(k)];
            const double v = b.values()[static_cast<size_t>(k)];
            for (index_t i = 0; i < n; ++i) f(j * n + i, l * n + i) += v;
        }

    DenseMatrix c = matmul_a_bt(c1, c2);
    Eigen::Map<const Eigen::VectorXd> cvec(c.data(), nm);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
    if (!lu.isInvertible())
        throw SingularOperatorError("kron_solve: Kronecker-sum operator is singular");
    Eigen::VectorXd xvec = lu.solve(cvec);

    DenseMatrix x(n, m);
    Eigen::Map<Eigen::VectorXd>(x.data(), nm) = xvec;
    return x;
}

double dense_residual(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                      const DenseMatrix& c2, const DenseMatrix& x) {
    DenseMatrix res = matmul_a_bt(c1, c2);
    axpy(-1.0, sylvester_apply(a, b, x), res);
    return frobenius_norm(res) / frobenius_norm(matmul_a_bt(c1, c2));
}

}  // namespace sylkrylov
