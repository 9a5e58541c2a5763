#pragma once

#include "sylkrylov/dense_matrix.hpp"
#include "sylkrylov/low_rank.hpp"
#include "sylkrylov/solver_types.hpp"
#include "sylkrylov/sparse_matrix.hpp"

namespace sylkrylov {

struct DenseSolution {
    DenseMatrix X;
    ConvergenceHistory history;
    SolveStatus status = SolveStatus::max_iter;
};

struct SymmetricLowRankSolution {
    SymmetricLowRankMatrix X;
    ConvergenceHistory history;
    SolveStatus status = SolveStatus::max_iter;
};

struct LowRankSolution {
    LowRankMatrix X;
    ConvergenceHistory history;
    SolveStatus status = SolveStatus::max_iter;
};

/// Matrix-oriented CG on A X + X B = C with dense iterates.
/// Guard: refuses n*m > 4e8 entries.
DenseSolution matrix_oriented_cg(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c,
                                 const SolverConfig& cfg = {});

/// Matrix-oriented BiCGSTAB on A X + X B = C with dense iterates.
DenseSolution matrix_oriented_bicgstab(const SparseMatrix& a, const SparseMatrix& b,
                                       const DenseMatrix& c, const SolverConfig& cfg = {});

struct TruncatedCgOptions {
    bool truncate_q = false;
    bool truncate_r = true;
};

/// Truncated CG for the Lyapunov equation A X + X A^T = C1 C1^T in symmetric
/// low-rank arithmetic. X and P are always recompressed; Q and R optionally.
/// The residual is recomputed explicitly every iteration.
SymmetricLowRankSolution truncated_cg(const SparseMatrix& a, const DenseMatrix& c1,
                                      const SolverConfig& cfg, double eps_t,
                                      const TruncatedCgOptions& opts = {});

enum class ResidualVariant { recursion, explicit_form };

struct TruncatedBicgstabOptions {
    bool truncate_q = true;
    bool truncate_s = true;
    bool truncate_t = false;
    ResidualVariant residual_variant = ResidualVariant::recursion;
};

/// Truncated BiCGSTAB for A X + X B = C1 C2^T in low-rank arithmetic.
/// The shadow residual is kept at rank s and never truncated.
LowRankSolution truncated_bicgstab(const SparseMatrix& a, const SparseMatrix& b,
                                   const DenseMatrix& c1, const DenseMatrix& c2,
                                   const SolverConfig& cfg, double eps_t,
                                   const TruncatedBicgstabOptions& opts = {});

/// Dense direct oracle: assembles I_m (x) A + B^T (x) I_n, solves by LU with
/// full pivoting, reshapes. Guard: refuses n*m > 40000. Raises
/// SingularOperatorError when A and -B share an eigenvalue.
DenseMatrix kron_solve(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                       const DenseMatrix& c2);

/// Relative dense residual ||C1 C2^T - A X - X B|| / ||C1 C2^T||.
double dense_residual(const SparseMatrix& a, const SparseMatrix& b, const DenseMatrix& c1,
                      const DenseMatrix& c2, const DenseMatrix& x);

}  // namespace sylkrylov
