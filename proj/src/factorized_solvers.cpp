#include "sylkrylov/factorized_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>

#include "sylkrylov/block_krylov.hpp"
#include "sylkrylov/decompositions.hpp"
#include "sylkrylov/errors.hpp"

namespace sylkrylov {

namespace {

/// Frobenius norm of big(1:rows, 1:cols).
double window_norm(const DenseMatrix& big, index_t rows, index_t cols) {
    double acc = 0.0;
    for (index_t j = 0; j < cols; ++j)
        for (index_t i = 0; i < rows; ++i) acc += big(i, j) * big(i, j);
    return std::sqrt(acc);
}

}  // namespace

DenseMatrix embed_to(const DenseMatrix& m, index_t rows, index_t cols) {
    if (rows < m.rows() || cols < m.cols()) throw DimensionError("embed: target smaller than matrix");
    DenseMatrix out(rows, cols);
    for (index_t j = 0; j < m.cols(); ++j)
        std::memcpy(out.data() + j * rows, m.data() + j * m.rows(),
                    static_cast<size_t>(m.rows()) * sizeof(double));
    return out;
}

DenseMatrix embed(const DenseMatrix& m, index_t target) { return embed_to(m, target, target); }

DenseMatrix small_sylvester_apply(const DenseMatrix& p, const DenseMatrix& h, const DenseMatrix& g) {
    if (h.cols() != p.rows() || g.cols() != p.cols())
        throw DimensionError("small_sylvester_apply: shapes do not conform");
    DenseMatrix hp = matmul(h, p);                        // h.rows x p.cols
    DenseMatrix pgt = matmul_a_bt(p, g);                  // p.rows x g.rows
    DenseMatrix out = embed_to(hp, h.rows(), g.rows());   // [H P, O]
    for (index_t j = 0; j < pgt.cols(); ++j)              // + [P G^T; O]
        for (index_t i = 0; i < pgt.rows(); ++i) out(i, j) += pgt(i, j);
    return out;
}

namespace {

void require_solver_inputs(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                           const DenseMatrix& c2) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw DimensionError("solver: A and B must be square");
    if (c1.rows() != a.rows() || c2.rows() != b.rows())
        throw DimensionError("solver: C1/C2 row counts must match A/B");
    if (c1.cols() != c2.cols() || c1.cols() < 1)
        throw DimensionError("solver: C1 and C2 must have the same positive column count");
}

/// Shared state of the factorized CG loop; the Lyapunov variant reuses the
/// loop with a single basis.
struct CgDriver {
    BlockKrylovBasis* vb;
    BlockKrylovBasis* wb;  // equals vb for Lyapunov

    bool lyapunov() const { return vb == wb; }

    /// Q = [H P, O] + [P G^T; O] windowed to the current basis sizes.
    DenseMatrix sylvester_image(const DenseMatrix& p, index_t sched) const {
        const index_t rows = std::min(sched, vb->cols());
        const index_t cols = std::min(sched, wb->cols());
        DenseMatrix q(rows, cols);
        if (lyapunov()) {
            // Symmetric cores: [H P, O] and [P H^T; O] are transposes.
            DenseMatrix hp(rows, p.cols());
            vb->accumulate_h_times(p, hp);
            for (index_t j = 0; j < p.cols(); ++j)
                for (index_t i = 0; i < rows; ++i) q(i, j) += hp(i, j);
            for (index_t j = 0; j < rows; ++j)
                for (index_t i = 0; i < p.cols(); ++i) q(i, j) += hp(j, i);
        } else {
            vb->accumulate_h_times(p, q);
            wb->accumulate_times_ht(p, q);
        }
        return q;
    }
};

FactorizedSolution run_factorized_cg(const SparseMatrix& a, const DenseMatrix& c1,
                                     const SparseMatrix* b, const DenseMatrix* c2,
                                     const SolverConfig& cfg) {
    const bool lyap = b == nullptr;
    const index_t m = lyap ? a.rows() : b->rows();
    const index_t max_iter = resolve_max_iter(cfg, a.rows(), m);
    const index_t s = c1.cols();

    FactorizedSolution sol;
    double total = 0.0;
    StopWatch total_watch(total);

    IterationRecord rec0;
    BasisOptions bopts{cfg.breakdown_tol, cfg.lanczos_full_reorth};

    DenseMatrix r_l, r_r;
    std::unique_ptr<BlockKrylovBasis> vb, wb_store;
    {
        StopWatch t(rec0.t_krylov_s);
        auto [vbasis, rl] = BlockKrylovBasis::init(a, c1, KrylovMode::lanczos, false, bopts);
        vb = std::make_unique<BlockKrylovBasis>(std::move(vbasis));
        r_l = std::move(rl);
        if (lyap) {
            r_r = r_l;
        } else {
            auto [wbasis, rr] = BlockKrylovBasis::init(*b, *c2, KrylovMode::lanczos, true, bopts);
            wb_store = std::make_unique<BlockKrylovBasis>(std::move(wbasis));
            r_r = std::move(rr);
        }
    }
    CgDriver drv{vb.get(), lyap ? vb.get() : wb_store.get()};

    DenseMatrix r, p, x;
    double rho, norm_r0;
    {
        StopWatch t(rec0.t_basic_s);
        r = matmul_a_bt(r_l, r_r);  // bold R_0
        p = r;
        rho = frobenius_inner(r, r);
        norm_r0 = std::sqrt(rho);
    }
    rec0.rel_residual = 1.0;
    sol.history.records.push_back(rec0);
    sol.status = SolveStatus::max_iter;

    for (index_t k = 0; k < max_iter; ++k) {
        IterationRecord rec;
        rec.iteration = k + 1;
        rec.rel_residual = sol.history.records.back().rel_residual;

        try {
            StopWatch t(rec.t_krylov_s);
            drv.vb->try_extend();
            if (!lyap) drv.wb->try_extend();
        } catch (const BreakdownError&) {
            sol.status = SolveStatus::breakdown;
            sol.history.records.push_back(rec);
            break;
        }

        StopWatch t(rec.t_basic_s);
        DenseMatrix q = drv.sylvester_image(p, (k + 2) * s);

        // denom / rho is a Rayleigh quotient of the Kronecker-sum operator;
        // it stays bounded below for definite problems at any residual level.
        const double denom = windowed_inner(r, q);
        if (std::abs(denom) < cfg.breakdown_tol * rho) {
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double alpha = rho / denom;

        x = embed_to(x, p.rows(), p.cols());
        axpy(alpha, p, x);

        DenseMatrix r_next = embed_to(r, q.rows(), q.cols());
        axpy(-alpha, q, r_next);

        const double norm_r = frobenius_norm(r_next);
        rec.rel_residual = norm_r / norm_r0;
        if (cfg.capture_iterates) sol.captured_cores.push_back(x);

        if (norm_r <= norm_r0 * cfg.eps_tol) {
            sol.status = SolveStatus::converged;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }

        const double rho_next = frobenius_inner(r_next, r_next);
        const double beta = rho_next / rho;
        DenseMatrix p_next = r_next;
        {
            DenseMatrix p_pad = embed_to(p, r_next.rows(), r_next.cols());
            axpy(beta, p_pad, p_next);
        }
        p = std::move(p_next);
        r = std::move(r_next);
        rho = rho_next;
        t.stop();
        sol.history.records.push_back(rec);
    }

    sol.V = drv.vb->basis_prefix(x.rows());
    sol.W = lyap ? sol.V : drv.wb->basis_prefix(x.cols());
    sol.core = std::move(x);
    total_watch.stop();
    sol.history.total_time_s = total;
    return sol;
}

}  // namespace

FactorizedSolution factorized_cg(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                                 const DenseMatrix& c2, const SolverConfig& cfg) {
    require_solver_inputs(a, b, c1, c2);
    if (!a.is_symmetric(1e-12)) throw InvalidMatrixError("factorized_cg: A is not symmetric");
    if (!b.is_symmetric(1e-12)) throw InvalidMatrixError("factorized_cg: B is not symmetric");
    return run_factorized_cg(a, c1, &b, &c2, cfg);
}

FactorizedSolution factorized_cg_lyapunov(const SparseMatrix& a, const DenseMatrix& c1,
                                          const SolverConfig& cfg) {
    if (a.rows() != a.cols()) throw DimensionError("factorized_cg_lyapunov: A must be square");
    if (c1.rows() != a.rows()) throw DimensionError("factorized_cg_lyapunov: C1 rows must match A");
    if (!a.is_symmetric(1e-12)) throw InvalidMatrixError("factorized_cg_lyapunov: A is not symmetric");
    return run_factorized_cg(a, c1, nullptr, nullptr, cfg);
}

FactorizedSolution factorized_bicgstab(const SparseMatrix& a, const SparseMatrix& b,
                                       const DenseMatrix& c1, const DenseMatrix& c2,
                                       const SolverConfig& cfg) {
    require_solver_inputs(a, b, c1, c2);
    const index_t max_iter = resolve_max_iter(cfg, a.rows(), b.rows());
    const index_t s = c1.cols();

    FactorizedSolution sol;
    double total = 0.0;
    StopWatch total_watch(total);

    IterationRecord rec0;
    BasisOptions bopts{cfg.breakdown_tol, false};

    DenseMatrix r_l, r_r;
    std::unique_ptr<BlockKrylovBasis> vb, wb;
    {
        StopWatch t(rec0.t_krylov_s);
        auto [vbasis, rl] = BlockKrylovBasis::init(a, c1, KrylovMode::arnoldi, false, bopts);
        auto [wbasis, rr] = BlockKrylovBasis::init(b, c2, KrylovMode::arnoldi, true, bopts);
        vb = std::make_unique<BlockKrylovBasis>(std::move(vbasis));
        wb = std::make_unique<BlockKrylovBasis>(std::move(wbasis));
        r_l = std::move(rl);
        r_r = std::move(rr);
    }

    DenseMatrix r, r_shadow, p, x;
    double rho, norm_r0, norm_shadow;
    {
        StopWatch t(rec0.t_basic_s);
        r = matmul_a_bt(r_l, r_r);
        r_shadow = r;  // bold R~_0 = R_0
        p = r;
        rho = frobenius_inner(r_shadow, r);
        norm_r0 = std::sqrt(frobenius_inner(r, r));
        norm_shadow = norm_r0;
    }
    rec0.rel_residual = 1.0;
    sol.history.records.push_back(rec0);
    sol.status = SolveStatus::max_iter;

    auto image = [&](const DenseMatrix& src, index_t sched) {
        DenseMatrix out(std::min(sched, vb->cols()), std::min(sched, wb->cols()));
        vb->accumulate_h_times(src, out);
        wb->accumulate_times_ht(src, out);
        return out;
    };

    for (index_t k = 0; k < max_iter; ++k) {
        IterationRecord rec;
        rec.iteration = k + 1;
        rec.rel_residual = sol.history.records.back().rel_residual;
        bool broke = false;

        auto extend_both = [&]() {
            StopWatch t(rec.t_krylov_s);
            vb->try_extend();
            wb->try_extend();
        };

        try {
            extend_both();  // step 2k+1
        } catch (const BreakdownError&) {
            sol.status = SolveStatus::breakdown;
            sol.history.records.push_back(rec);
            break;
        }

        DenseMatrix q, s_mat;
        double alpha = 0.0;
        {
            StopWatch t(rec.t_basic_s);
            q = image(p, (2 * k + 2) * s);
            // Guards compare angles, not raw magnitudes, so legitimate deep
            // convergence does not masquerade as breakdown.
            const double denom = windowed_inner(r_shadow, q);
            const double q_win = window_norm(q, r_shadow.rows(), r_shadow.cols());
            if (std::abs(denom) < cfg.breakdown_tol * norm_shadow * q_win) {
                broke = true;
            } else {
                alpha = rho / denom;
                s_mat = embed_to(r, q.rows(), q.cols());
                axpy(-alpha, q, s_mat);
            }
        }
        if (broke) {
            sol.status = SolveStatus::breakdown;
            sol.history.records.push_back(rec);
            break;
        }

        try {
            extend_both();  // step 2k+2
        } catch (const BreakdownError&) {
            sol.status = SolveStatus::breakdown;
            sol.history.records.push_back(rec);
            break;
        }

        StopWatch t(rec.t_basic_s);
        DenseMatrix t_mat = image(s_mat, (2 * k + 3) * s);
        const double tt = frobenius_inner(t_mat, t_mat);
        const double ss = frobenius_inner(s_mat, s_mat);
        double omega;
        if (std::sqrt(ss) <= cfg.eps_tol * norm_r0) {
            // Converged at the half step; omega = 0 lets the residual update
            // and stopping rule fire.
            omega = 0.0;
        } else if (tt < cfg.breakdown_tol * ss) {
            // T = F(S) nearly vanished against S: operator near singular along S.
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        } else {
            omega = windowed_inner(s_mat, t_mat) / tt;
        }

        x = embed_to(x, s_mat.rows(), s_mat.cols());
        {
            DenseMatrix p_pad = embed_to(p, s_mat.rows(), s_mat.cols());
            axpy(alpha, p_pad, x);
        }
        axpy(omega, s_mat, x);

        DenseMatrix r_next = embed_to(s_mat, t_mat.rows(), t_mat.cols());
        axpy(-omega, t_mat, r_next);

        const double norm_r = frobenius_norm(r_next);
        rec.rel_residual = norm_r / norm_r0;
        if (cfg.capture_iterates) sol.captured_cores.push_back(x);

        if (norm_r <= norm_r0 * cfg.eps_tol) {
            sol.status = SolveStatus::converged;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }

        const double rho_next = windowed_inner(r_shadow, r_next);
        const double r_win = window_norm(r_next, r_shadow.rows(), r_shadow.cols());
        if (std::abs(rho_next) < cfg.breakdown_tol * norm_shadow * r_win) {
            sol.status = SolveStatus::breakdown;
            t.stop();
            sol.history.records.push_back(rec);
            break;
        }
        const double beta = (alpha / omega) * (rho_next / rho);

        DenseMatrix p_next = r_next;
        {
            DenseMatrix p_pad = embed_to(p, r_next.rows(), r_next.cols());
            axpy(beta, p_pad, p_next);
            DenseMatrix q_pad = embed_to(q, r_next.rows(), r_next.cols());
            axpy(-beta * omega, q_pad, p_next);
        }
        p = std::move(p_next);
        r = std::move(r_next);
        rho = rho_next;
        t.stop();
        sol.history.records.push_back(rec);
    }

    sol.V = vb->basis_prefix(x.rows());
    sol.W = wb->basis_prefix(x.cols());
    sol.core = std::move(x);
    total_watch.stop();
    sol.history.total_time_s = total;
    return sol;
}

double true_residual_factors(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                             const DenseMatrix& c2, const DenseMatrix& v, const DenseMatrix& core,
                             const DenseMatrix& w) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw DimensionError("true_residual: A and B must be square");
    if (c1.rows() != a.rows() || c2.rows() != b.rows() || c1.cols() != c2.cols())
        throw DimensionError("true_residual: right-hand side shapes do not conform");
    if (v.rows() != a.rows() || w.rows() != b.rows() || v.cols() != core.rows() ||
        w.cols() != core.cols())
        throw DimensionError("true_residual: factor shapes do not conform");

    const index_t n = a.rows(), m = b.rows(), s = c1.cols(), r = core.cols();

    // Denominator ||C1 C2^T||.
    const QrResult qc1 = compact_qr(c1);
    const QrResult qc2 = compact_qr(c2);
    const double denom = frobenius_norm(matmul_a_bt(qc1.r, qc2.r));
    if (denom == 0.0) throw InvalidMatrixError("true_residual: zero right-hand side");

    // Residual factors [C1, A V core, V core] x diag(I, -I, -I) x [C2, W, B^T W]^T.
    DenseMatrix vc = matmul(v, core);      // n x r
    DenseMatrix avc = spmm(a, vc);         // n x r
    DenseMatrix btw = spmm_transpose(b, w);  // m x r

    DenseMatrix uf(n, s + 2 * r), vf(m, s + 2 * r);
    for (index_t j = 0; j < s; ++j)
        for (index_t i = 0; i < n; ++i) uf(i, j) = c1(i, j);
    for (index_t j = 0; j < r; ++j)
        for (index_t i = 0; i < n; ++i) {
            uf(i, s + j) = avc(i, j);
            uf(i, s + r + j) = vc(i, j);
        }
    for (index_t j = 0; j < s; ++j)
        for (index_t i = 0; i < m; ++i) vf(i, j) = c2(i, j);
    for (index_t j = 0; j < r; ++j)
        for (index_t i = 0; i < m; ++i) {
            vf(i, s + j) = w(i, j);
            vf(i, s + r + j) = btw(i, j);
        }

    const QrResult qu = compact_qr(uf);
    const QrResult qv = compact_qr(vf);

    // Core of the residual: R_u * diag(I_s, -I_r, -I_r) * R_v^T.
    DenseMatrix ru = qu.r;
    for (index_t j = s; j < s + 2 * r; ++j)
        for (index_t i = 0; i < ru.rows(); ++i) ru(i, j) = -ru(i, j);
    return frobenius_norm(matmul_a_bt(ru, qv.r)) / denom;
}

double true_residual(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                     const DenseMatrix& c2, const FactorizedSolution& sol) {
    return true_residual_factors(a, b, c1, c2, sol.V, sol.core, sol.W);
}

}  // namespace sylkrylov
