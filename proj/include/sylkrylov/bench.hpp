#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sylkrylov/problems.hpp"
#include "sylkrylov/solver_types.hpp"

namespace sylkrylov {

enum class Method { mo_cg, mo_bicgstab, f_cg, f_bicgstab, t_cg, t_bicgstab };

Method parse_method(const std::string& s);
const char* to_string(Method m);
bool is_cg_family(Method m);

struct BenchParams {
    index_t s = 3;
    std::uint64_t seed = 1234;
    double eps_t = 1e-12;
    /// 0 keeps the example's own threshold.
    double eps_tol_override = 0.0;
    index_t max_iter = 0;
};

struct MethodReport {
    std::string method;
    std::string status;  // converged | max_iter | breakdown | error
    std::string error;   // nonempty only when status == error
    index_t iterations = 0;
    double total_time_s = 0.0;
    double time_basic_s = 0.0;
    double time_krylov_s = 0.0;
    double time_trunc_s = 0.0;
    /// Recomputed from the returned solution, never read from the history.
    double final_true_residual = 0.0;
    index_t final_rank = 0;
    ConvergenceHistory history;
};

struct BenchReport {
    std::string example;
    std::string scale;
    index_t n = 0, m = 0, s = 0;
    std::uint64_t seed = 0;
    double eps_tol = 0.0;
    double eps_t = 0.0;
    std::vector<MethodReport> methods;
};

/// Builds the example instance, runs each method with the example's eps_tol,
/// and recomputes true residuals. Solver failures are recorded per method
/// without aborting the others; an invalid method/example pairing throws.
BenchReport run_benchmark(ExampleId id, BenchScale scale, const std::vector<Method>& methods,
                          const BenchParams& params = {});

void write_bench_json(const BenchReport& report, const std::string& path);
std::string bench_to_json(const BenchReport& report);

/// CSV columns: iteration, rel_residual, cumulative_time_s, basic_s, krylov_s, trunc_s.
void write_history_csv(const ConvergenceHistory& history, const std::string& path);

}  // namespace sylkrylov
