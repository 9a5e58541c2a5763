#include "sylkrylov/solver_types.hpp"

#include <algorithm>

namespace sylkrylov {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::breakdown: return "breakdown";
    }
    return "unknown";
}

double ConvergenceHistory::time_basic_s() const {
    double t = 0.0;
    for (const auto& r : records) t += r.t_basic_s;
    return t;
}

double ConvergenceHistory::time_krylov_s() const {
    double t = 0.0;
    for (const auto& r : records) t += r.t_krylov_s;
    return t;
}

double ConvergenceHistory::time_trunc_s() const {
    double t = 0.0;
    for (const auto& r : records) t += r.t_trunc_s;
    return t;
}

index_t resolve_max_iter(const SolverConfig& cfg, index_t n, index_t m) {
    if (cfg.max_iter > 0) return cfg.max_iter;
    const double root = std::sqrt(static_cast<double>(n) * static_cast<double>(m));
    return std::min<index_t>(10 * static_cast<index_t>(std::ceil(root)), 10000);
}

}  // namespace sylkrylov
