#pragma once

#include <vector>

#include "sylkrylov/dense_matrix.hpp"
#include "sylkrylov/solver_types.hpp"
#include "sylkrylov/sparse_matrix.hpp"

namespace sylkrylov {

/// Approximate solution X = V * core * W^T with column-orthonormal V, W.
/// For the Lyapunov solver W equals V. The core is square r x r unless a
/// Krylov space saturated on one side only, in which case it is r_v x r_w.
struct FactorizedSolution {
    DenseMatrix V;     // n x core.rows()
    DenseMatrix core;  // the bold small matrix
    DenseMatrix W;     // m x core.cols()
    ConvergenceHistory history;
    SolveStatus status = SolveStatus::max_iter;
    /// Per-iteration core snapshots when SolverConfig::capture_iterates is set;
    /// snapshot j lifts against the leading columns of V and W.
    std::vector<DenseMatrix> captured_cores;
};

/// M placed in the upper-left corner of a target x target zero matrix.
/// Requires target >= max(M dims).
DenseMatrix embed(const DenseMatrix& m, index_t target);

/// Rectangular variant used internally when a basis has saturated.
DenseMatrix embed_to(const DenseMatrix& m, index_t rows, index_t cols);

/// Small-matrix image of the Sylvester operator: [H*P, O] + [P*G^T; O].
/// The result has H.rows() rows and G.rows() columns.
DenseMatrix small_sylvester_apply(const DenseMatrix& p, const DenseMatrix& h, const DenseMatrix& g);

/// Factorized CG for A X + X B = C1 C2^T with symmetric positive definite
/// A and B. Symmetry is checked (to 1e-12 relative); definiteness is the
/// caller's responsibility. The initial guess is fixed at X0 = 0.
FactorizedSolution factorized_cg(const SparseMatrix& a, const SparseMatrix& b,
                                 const DenseMatrix& c1, const DenseMatrix& c2,
                                 const SolverConfig& cfg = {});

/// Lyapunov specialization (B = A^T, C2 = C1): one basis, one recurrence
/// product per iteration, W = V in the result.
FactorizedSolution factorized_cg_lyapunov(const SparseMatrix& a, const DenseMatrix& c1,
                                          const SolverConfig& cfg = {});

/// Factorized BiCGSTAB for general square A, B.
FactorizedSolution factorized_bicgstab(const SparseMatrix& a, const SparseMatrix& b,
                                       const DenseMatrix& c1, const DenseMatrix& c2,
                                       const SolverConfig& cfg = {});

/// Relative true residual ||C1 C2^T - A X - X B|| / ||C1 C2^T|| with
/// X = V core W^T, computed from the stacked low-rank factorization of the
/// residual without forming X.
double true_residual(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                     const DenseMatrix& c2, const FactorizedSolution& sol);

double true_residual_factors(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                             const DenseMatrix& c2, const DenseMatrix& v, const DenseMatrix& core,
                             const DenseMatrix& w);

}  // namespace sylkrylov
