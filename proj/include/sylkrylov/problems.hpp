#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "sylkrylov/dense_matrix.hpp"
#include "sylkrylov/sparse_matrix.hpp"

namespace sylkrylov {

/// 2D Laplacian 5-point stencil on a grid x grid mesh: I (x) T + T (x) I with
/// T = tridiag(-1, 2, -1), unscaled. Symmetric positive definite, n = grid^2.
SparseMatrix laplacian_2d(index_t grid);

/// 3D convection-diffusion 7-point stencil on a grid^3 mesh: unscaled -Laplace
/// part (diagonal 6) plus centered-difference convection scaled by
/// h = 1/(grid+1). Nonsymmetric when the convection vector is nonzero.
SparseMatrix convection_diffusion_3d(index_t grid, const std::array<double, 3>& convection);

/// rows x s matrix of i.i.d. standard normal entries from mt19937_64 with
/// Box-Muller variates, filled column-major. Bit-identical for a given seed
/// across platforms.
DenseMatrix random_rhs(index_t rows, index_t s, std::uint64_t seed);

struct ProblemInstance {
    SparseMatrix A;
    std::optional<SparseMatrix> B;  // absent for Lyapunov (B = A^T, C2 = C1)
    DenseMatrix C1;
    std::optional<DenseMatrix> C2;
    std::string label;
    std::uint64_t seed = 0;

    bool lyapunov() const { return !B.has_value(); }
};

enum class ExampleId { ex1, ex2, ex3, ex4 };
enum class BenchScale { full, desk };

ExampleId parse_example_id(const std::string& s);
const char* to_string(ExampleId id);

/// Constructs the benchmark instance for an example: ex1/ex3 are Lyapunov
/// problems on the 2D Laplacian (grid 100 full, 30 desk); ex2/ex4 are
/// Sylvester problems on the 3D convection-diffusion operator with
/// convection (10, 10, 10) (grids 20/25 full, 8 desk).
ProblemInstance make_example_instance(ExampleId id, BenchScale scale, index_t s, std::uint64_t seed);

/// Example's convergence threshold: 1e-8 for ex1/ex2, 1e-6 for ex3/ex4.
double example_eps_tol(ExampleId id);

}  // namespace sylkrylov
