#include "sylkrylov/problems.hpp"

#include <cmath>
#include <random>

#include "sylkrylov/errors.hpp"

namespace sylkrylov {

SparseMatrix laplacian_2d(index_t grid) {
    if (grid < 2) throw std::invalid_argument("laplacian_2d: grid must be >= 2");
    const index_t n = grid * grid;
    std::vector<index_t> rows, cols;
    std::vector<double> vals;
    rows.reserve(static_cast<size_t>(5 * n));
    cols.reserve(static_cast<size_t>(5 * n));
    vals.reserve(static_cast<size_t>(5 * n));
    auto idx = [grid](index_t ix, index_t iy) { return ix + grid * iy; };
    for (index_t iy = 0; iy < grid; ++iy) {
        for (index_t ix = 0; ix < grid; ++ix) {
            const index_t p = idx(ix, iy);
            rows.push_back(p); cols.push_back(p); vals.push_back(4.0);
            if (ix > 0)       { rows.push_back(p); cols.push_back(idx(ix - 1, iy)); vals.push_back(-1.0); }
            if (ix < grid - 1){ rows.push_back(p); cols.push_back(idx(ix + 1, iy)); vals.push_back(-1.0); }
            if (iy > 0)       { rows.push_back(p); cols.push_back(idx(ix, iy - 1)); vals.push_back(-1.0); }
            if (iy < grid - 1){ rows.push_back(p); cols.push_back(idx(ix, iy + 1)); vals.push_back(-1.0); }
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(rows), std::move(cols), std::move(vals));
}

SparseMatrix convection_diffusion_3d(index_t grid, const std::array<double, 3>& convection) {
    if (grid < 2) throw std::invalid_argument("convection_diffusion_3d: grid must be >= 2");
    const index_t n = grid * grid * grid;
    const double h = 1.0 / (static_cast<double>(grid) + 1.0);
    std::vector<index_t> rows, cols;
    std::vector<double> vals;
    rows.reserve(static_cast<size_t>(7 * n));
    cols.reserve(static_cast<size_t>(7 * n));
    vals.reserve(static_cast<size_t>(7 * n));
    auto idx = [grid](index_t ix, index_t iy, index_t iz) { return ix + grid * (iy + grid * iz); };
    // Neighbor couplings -1 -/+ h*w/2 per axis (centered differences).
    const std::array<double, 3> conv{convection[0] * h / 2.0, convection[1] * h / 2.0,
                                     convection[2] * h / 2.0};
    for (index_t iz = 0; iz < grid; ++iz) {
        for (index_t iy = 0; iy < grid; ++iy) {
            for (index_t ix = 0; ix < grid; ++ix) {
                const index_t p = idx(ix, iy, iz);
                rows.push_back(p); cols.push_back(p); vals.push_back(6.0);
                if (ix > 0)       { rows.push_back(p); cols.push_back(idx(ix - 1, iy, iz)); vals.push_back(-1.0 - conv[0]); }
                if (ix < grid - 1){ rows.push_back(p); cols.push_back(idx(ix + 1, iy, iz)); vals.push_back(-1.0 + conv[0]); }
                if (iy > 0)       { rows.push_back(p); cols.push_back(idx(ix, iy - 1, iz)); vals.push_back(-1.0 - conv[1]); }
                if (iy < grid - 1){ rows.push_back(p); cols.push_back(idx(ix, iy + 1, iz)); vals.push_back(-1.0 + conv[1]); }
                if (iz > 0)       { rows.push_back(p); cols.push_back(idx(ix, iy, iz - 1)); vals.push_back(-1.0 - conv[2]); }
                if (iz < grid - 1){ rows.push_back(p); cols.push_back(idx(ix, iy, iz + 1)); vals.push_back(-1.0 + conv[2]); }
            }
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(rows), std::move(cols), std::move(vals));
}

namespace {

/// Uniform in (0, 1]: (x >> 11) + 1 over 2^53.
double uniform_open_closed(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

DenseMatrix random_rhs(index_t rows, index_t s, std::uint64_t seed) {
    if (s < 1) throw std::invalid_argument("random_rhs: s must be >= 1");
    DenseMatrix m(rows, s);
    std::mt19937_64 gen(seed);
    // Box-Muller pairs; the distribution is spelled out here (rather than
    // std::normal_distribution) so streams are identical across platforms.
    double spare = 0.0;
    bool have_spare = false;
    double* data = m.data();
    const size_t count = static_cast<size_t>(rows) * static_cast<size_t>(s);
    for (size_t i = 0; i < count; ++i) {
        if (have_spare) {
            data[i] = spare;
            have_spare = false;
        } else {
            const double u1 = uniform_open_closed(gen);
            const double u2 = uniform_open_closed(gen);
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * M_PI * u2;
            data[i] = radius * std::cos(angle);
            spare = radius * std::sin(angle);
            have_spare = true;
        }
    }
    return m;
}

ExampleId parse_example_id(const std::string& s) {
    if (s == "ex1") return ExampleId::ex1;
    if (s == "ex2") return ExampleId::ex2;
    if (s == "ex3") return ExampleId::ex3;
    if (s == "ex4") return ExampleId::ex4;
    throw std::invalid_argument("unknown example id: " + s);
}

const char* to_string(ExampleId id) {
    switch (id) {
        case ExampleId::ex1: return "ex1";
        case ExampleId::ex2: return "ex2";
        case ExampleId::ex3: return "ex3";
        case ExampleId::ex4: return "ex4";
    }
    return "?";
}

double example_eps_tol(ExampleId id) {
    return (id == ExampleId::ex1 || id == ExampleId::ex2) ? 1e-8 : 1e-6;
}

ProblemInstance make_example_instance(ExampleId id, BenchScale scale, index_t s, std::uint64_t seed) {
    ProblemInstance inst;
    inst.seed = seed;
    inst.label = std::string(to_string(id)) + (scale == BenchScale::full ? "-full" : "-desk");
    const bool lyap = (id == ExampleId::ex1 || id == ExampleId::ex3);
    if (lyap) {
        const index_t grid = scale == BenchScale::full ? 100 : 30;
        inst.A = laplacian_2d(grid);
        inst.C1 = random_rhs(inst.A.rows(), s, seed);
    } else {
        const index_t grid = scale == BenchScale::full ? (id == ExampleId::ex2 ? 20 : 25) : 8;
        inst.A = convection_diffusion_3d(grid, {10.0, 10.0, 10.0});
        inst.B = inst.A;
        inst.C1 = random_rhs(inst.A.rows(), s, seed);
        inst.C2 = random_rhs(inst.A.rows(), s, seed + 1);
    }
    return inst;
}

}  // namespace sylkrylov
