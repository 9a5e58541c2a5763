#pragma once

#include <chrono>
#include <cmath>
#include <vector>

#include "sylkrylov/dense_matrix.hpp"

namespace sylkrylov {

enum class SolveStatus { converged, max_iter, breakdown };

const char* to_string(SolveStatus s);

struct IterationRecord {
    index_t iteration = 0;
    double rel_residual = 0.0;
    // Wall time spent in this iteration, split by category. Exactly one of
    // t_krylov_s / t_trunc_s is nonzero depending on the method family.
    double t_basic_s = 0.0;
    double t_krylov_s = 0.0;
    double t_trunc_s = 0.0;
};

struct ConvergenceHistory {
    std::vector<IterationRecord> records;  // records[0] is iteration 0, rel 1.0
    double total_time_s = 0.0;

    index_t iterations() const { return records.empty() ? 0 : records.back().iteration; }
    double final_rel_residual() const { return records.empty() ? 1.0 : records.back().rel_residual; }
    double time_basic_s() const;
    double time_krylov_s() const;
    double time_trunc_s() const;
};

struct SolverConfig {
    double eps_tol = 1e-8;
    /// 0 selects the default 10 * ceil(sqrt(n*m)), capped at 10000.
    index_t max_iter = 0;
    double breakdown_tol = 1e-12;
    /// Test hook: snapshot the solution core after every iteration.
    bool capture_iterates = false;
    /// Forwarded to the block Lanczos process (CG family).
    bool lanczos_full_reorth = false;
};

index_t resolve_max_iter(const SolverConfig& cfg, index_t n, index_t m);

/// Monotonic stopwatch accumulating seconds into a caller-owned slot.
class StopWatch {
public:
    using clock = std::chrono::steady_clock;
    explicit StopWatch(double& slot) : slot_(slot), start_(clock::now()) {}
    ~StopWatch() { stop(); }
    void stop() {
        if (!stopped_) {
            slot_ += std::chrono::duration<double>(clock::now() - start_).count();
            stopped_ = true;
        }
    }
    StopWatch(const StopWatch&) = delete;
    StopWatch& operator=(const StopWatch&) = delete;

private:
    double& slot_;
    clock::time_point start_;
    bool stopped_ = false;
};

}  // namespace sylkrylov
