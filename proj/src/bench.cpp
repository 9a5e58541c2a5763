#include "sylkrylov/bench.hpp"

#include <fstream>

#include <json.hpp>

#include "sylkrylov/errors.hpp"
#include "sylkrylov/factorized_solvers.hpp"
#include "sylkrylov/reference_solvers.hpp"

namespace sylkrylov {

Method parse_method(const std::string& s) {
    if (s == "mo-cg") return Method::mo_cg;
    if (s == "mo-bicgstab") return Method::mo_bicgstab;
    if (s == "f-cg") return Method::f_cg;
    if (s == "f-bicgstab") return Method::f_bicgstab;
    if (s == "t-cg") return Method::t_cg;
    if (s == "t-bicgstab") return Method::t_bicgstab;
    throw std::invalid_argument("unknown method: " + s);
}

const char* to_string(Method m) {
    switch (m) {
        case Method::mo_cg: return "mo-cg";
        case Method::mo_bicgstab: return "mo-bicgstab";
        case Method::f_cg: return "f-cg";
        case Method::f_bicgstab: return "f-bicgstab";
        case Method::t_cg: return "t-cg";
        case Method::t_bicgstab: return "t-bicgstab";
    }
    return "?";
}

bool is_cg_family(Method m) {
    return m == Method::mo_cg || m == Method::f_cg || m == Method::t_cg;
}

namespace {

void fill_times(MethodReport& rep, const ConvergenceHistory& h) {
    rep.iterations = h.iterations();
    rep.total_time_s = h.total_time_s;
    rep.time_basic_s = h.time_basic_s();
    rep.time_krylov_s = h.time_krylov_s();
    rep.time_trunc_s = h.time_trunc_s();
    rep.history = h;
}

}  // namespace

BenchReport run_benchmark(ExampleId id, BenchScale scale, const std::vector<Method>& methods,
                          const BenchParams& params) {
    const bool lyap_example = (id == ExampleId::ex1 || id == ExampleId::ex3);
    for (Method m : methods) {
        if (is_cg_family(m) != lyap_example)
            throw std::invalid_argument(std::string("method ") + to_string(m) +
                                        " is not valid for example " + to_string(id));
    }

    ProblemInstance inst = make_example_instance(id, scale, params.s, params.seed);
    const SparseMatrix& a = inst.A;
    const SparseMatrix& b = inst.lyapunov() ? inst.A : *inst.B;  // A symmetric: B = A^T = A
    const DenseMatrix& c1 = inst.C1;
    const DenseMatrix& c2 = inst.lyapunov() ? inst.C1 : *inst.C2;

    SolverConfig cfg;
    cfg.eps_tol = params.eps_tol_override > 0.0 ? params.eps_tol_override : example_eps_tol(id);
    cfg.max_iter = params.max_iter;

    BenchReport report;
    report.example = to_string(id);
    report.scale = scale == BenchScale::full ? "full" : "desk";
    report.n = a.rows();
    report.m = b.rows();
    report.s = params.s;
    report.seed = params.seed;
    report.eps_tol = cfg.eps_tol;
    report.eps_t = params.eps_t;

    for (Method m : methods) {
        MethodReport rep;
        rep.method = to_string(m);
        try {
            switch (m) {
                case Method::f_cg: {
                    FactorizedSolution sol = inst.lyapunov()
                                                 ? factorized_cg_lyapunov(a, c1, cfg)
                                                 : factorized_cg(a, b, c1, c2, cfg);
                    rep.status = to_string(sol.status);
                    fill_times(rep, sol.history);
                    rep.final_rank = std::min(sol.core.rows(), sol.core.cols());
                    rep.final_true_residual = true_residual(a, b, c1, c2, sol);
                    break;
                }
                case Method::f_bicgstab: {
                    FactorizedSolution sol = factorized_bicgstab(a, b, c1, c2, cfg);
                    rep.status = to_string(sol.status);
                    fill_times(rep, sol.history);
                    rep.final_rank = std::min(sol.core.rows(), sol.core.cols());
                    rep.final_true_residual = true_residual(a, b, c1, c2, sol);
                    break;
                }
                case Method::mo_cg:
                case Method::mo_bicgstab: {
                    DenseMatrix c = matmul_a_bt(c1, c2);
                    DenseSolution sol = m == Method::mo_cg
                                            ? matrix_oriented_cg(a, b, c, cfg)
                                            : matrix_oriented_bicgstab(a, b, c, cfg);
                    rep.status = to_string(sol.status);
                    fill_times(rep, sol.history);
                    rep.final_rank = std::min(sol.X.rows(), sol.X.cols());  // dense storage rank
                    rep.final_true_residual = dense_residual(a, b, c1, c2, sol.X);
                    break;
                }
                case Method::t_cg: {
                    SymmetricLowRankSolution sol = truncated_cg(a, c1, cfg, params.eps_t);
                    rep.status = to_string(sol.status);
                    fill_times(rep, sol.history);
                    rep.final_rank = sol.X.rank();
                    rep.final_true_residual =
                        true_residual_factors(a, b, c1, c2, sol.X.Z, sol.X.D, sol.X.Z);
                    break;
                }
                case Method::t_bicgstab: {
                    LowRankSolution sol = truncated_bicgstab(a, b, c1, c2, cfg, params.eps_t);
                    rep.status = to_string(sol.status);
                    fill_times(rep, sol.history);
                    rep.final_rank = sol.X.rank();
                    rep.final_true_residual =
                        true_residual_factors(a, b, c1, c2, sol.X.U, sol.X.S, sol.X.V);
                    break;
                }
            }
        } catch (const std::exception& e) {
            rep.status = "error";
            rep.error = e.what();
        }
        report.methods.push_back(std::move(rep));
    }
    return report;
}

std::string bench_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["example"] = report.example;
    j["scale"] = report.scale;
    j["n"] = report.n;
    j["m"] = report.m;
    j["s"] = report.s;
    j["seed"] = report.seed;
    j["eps_tol"] = report.eps_tol;
    j["eps_trunc"] = report.eps_t;
    j["methods"] = nlohmann::json::array();
    for (const MethodReport& m : report.methods) {
        nlohmann::json jm;
        jm["method"] = m.method;
        jm["status"] = m.status;
        if (!m.error.empty()) jm["error"] = m.error;
        jm["iterations"] = m.iterations;
        jm["total_time_s"] = m.total_time_s;
        jm["time_basic_s"] = m.time_basic_s;
        jm["time_krylov_s"] = m.time_krylov_s;
        jm["time_trunc_s"] = m.time_trunc_s;
        jm["final_true_residual"] = m.final_true_residual;
        jm["final_rank"] = m.final_rank;
        j["methods"].push_back(std::move(jm));
    }
    return j.dump(2);
}

void write_bench_json(const BenchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << bench_to_json(report) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void write_history_csv(const ConvergenceHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "iteration,rel_residual,cumulative_time_s,basic_s,krylov_s,trunc_s\n";
    char buf[160];
    double cumulative = 0.0;
    for (const IterationRecord& r : history.records) {
        cumulative += r.t_basic_s + r.t_krylov_s + r.t_trunc_s;
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(r.iteration), r.rel_residual, cumulative, r.t_basic_s,
                      r.t_krylov_s, r.t_trunc_s);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace sylkrylov
