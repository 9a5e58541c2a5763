#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sylkrylov/bench.hpp"
#include "sylkrylov/errors.hpp"
#include "sylkrylov/factorized_solvers.hpp"
#include "sylkrylov/matrix_market.hpp"
#include "sylkrylov/parallel.hpp"
#include "sylkrylov/problems.hpp"
#include "sylkrylov/reference_solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sylkrylov;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitMaxIter = 2;
constexpr int kExitBreakdown = 3;
constexpr int kExitCheckFailed = 4;

int status_exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return kExitOk;
        case SolveStatus::max_iter: return kExitMaxIter;
        case SolveStatus::breakdown: return kExitBreakdown;
    }
    return kExitInputError;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[8192];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

json input_digest(const std::string& path) {
    json j;
    j["path"] = path;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64_file(path)));
    j["fnv1a64"] = buf;
    return j;
}

void enable_parallel_from_env() {
    unsigned threads = 0;
    if (const char* env = std::getenv("SYLKRYLOV_THREADS")) threads = std::strtoul(env, nullptr, 10);
    set_parallel_kernels(true, threads);
}

struct SolveArgs {
    std::string a_path, b_path, c1_path, c2_path;
    std::string method = "f-cg";
    double tol = 1e-8;
    double eps_trunc = 1e-12;
    index_t max_iter = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    index_t random_rhs_cols = 0;
    std::string out_dir = ".";
    bool parallel = false;
};

int run_solve(const SolveArgs& args) {
    Method method;
    try {
        method = parse_method(args.method);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    if (args.parallel) enable_parallel_from_env();

    const bool lyapunov = args.b_path.empty();
    SparseMatrix a, b;
    DenseMatrix c1, c2;
    json inputs;
    try {
        a = read_matrix_market_sparse(args.a_path);
        inputs["A"] = input_digest(args.a_path);
        if (!lyapunov) {
            b = read_matrix_market_sparse(args.b_path);
            inputs["B"] = input_digest(args.b_path);
        } else {
            if (!args.c2_path.empty())
                throw std::invalid_argument("--C2 requires --B (Lyapunov mode sets C2 = C1)");
            b = a.transposed();
        }
        if (!args.c1_path.empty()) {
            c1 = read_matrix_market_dense(args.c1_path);
            inputs["C1"] = input_digest(args.c1_path);
        } else if (args.random_rhs_cols > 0) {
            c1 = random_rhs(a.rows(), args.random_rhs_cols, args.seed);
        } else {
            throw std::invalid_argument("C1 is required: pass --C1 or --random-rhs");
        }
        if (lyapunov) {
            c2 = c1;
        } else if (!args.c2_path.empty()) {
            c2 = read_matrix_market_dense(args.c2_path);
            inputs["C2"] = input_digest(args.c2_path);
        } else if (args.random_rhs_cols > 0) {
            c2 = random_rhs(b.rows(), args.random_rhs_cols, args.seed + 1);
        } else {
            throw std::invalid_argument("C2 is required for Sylvester problems");
        }
        if (is_cg_family(method) && !a.is_symmetric(1e-12))
            throw std::invalid_argument(std::string(to_string(method)) +
                                        " requires a symmetric operator A");
        if ((method == Method::t_cg || (method == Method::f_cg && !lyapunov)) &&
            !b.is_symmetric(1e-12))
            throw std::invalid_argument(std::string(to_string(method)) +
                                        " requires a symmetric operator B");
        if (method == Method::t_cg && !lyapunov)
            throw std::invalid_argument("t-cg solves Lyapunov problems only (omit --B)");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    SolverConfig cfg;
    cfg.eps_tol = args.tol;
    cfg.max_iter = args.max_iter;

    json meta;
    meta["method"] = args.method;
    meta["eps_tol"] = cfg.eps_tol;
    meta["max_iter"] = resolve_max_iter(cfg, a.rows(), b.rows());
    meta["lyapunov"] = lyapunov;
    meta["inputs"] = inputs;
    if (args.seed_set || args.random_rhs_cols > 0) meta["seed"] = args.seed;
    if (method == Method::t_cg || method == Method::t_bicgstab) meta["eps_trunc"] = args.eps_trunc;

    SolveStatus status;
    ConvergenceHistory history;
    double residual = 0.0;
    json ranks;
    std::string format;

    try {
        fs::create_directories(args.out_dir);
        const fs::path out(args.out_dir);

        switch (method) {
            case Method::f_cg:
            case Method::f_bicgstab: {
                FactorizedSolution sol;
                if (method == Method::f_cg)
                    sol = lyapunov ? factorized_cg_lyapunov(a, c1, cfg)
                                   : factorized_cg(a, b, c1, c2, cfg);
                else
                    sol = factorized_bicgstab(a, b, c1, c2, cfg);
                status = sol.status;
                history = sol.history;
                residual = true_residual(a, b, c1, c2, sol);
                format = "factored";
                ranks["rank"] = std::min(sol.core.rows(), sol.core.cols());
                ranks["v_cols"] = sol.V.cols();
                ranks["w_cols"] = sol.W.cols();
                write_matrix_market(sol.V, (out / "V.mtx").string());
                write_matrix_market(sol.core, (out / "core.mtx").string());
                write_matrix_market(sol.W, (out / "W.mtx").string());
                break;
            }
            case Method::t_cg: {
                SymmetricLowRankSolution sol = truncated_cg(a, c1, cfg, args.eps_trunc);
                status = sol.status;
                history = sol.history;
                residual = true_residual_factors(a, b, c1, c2, sol.X.Z, sol.X.D, sol.X.Z);
                format = "symmetric-factored";
                ranks["rank"] = sol.X.rank();
                write_matrix_market(sol.X.Z, (out / "Z.mtx").string());
                write_matrix_market(sol.X.D, (out / "D.mtx").string());
                break;
            }
            case Method::t_bicgstab: {
                LowRankSolution sol = truncated_bicgstab(a, b, c1, c2, cfg, args.eps_trunc);
                status = sol.status;
                history = sol.history;
                residual = true_residual_factors(a, b, c1, c2, sol.X.U, sol.X.S, sol.X.V);
                format = "factored";
                ranks["rank"] = sol.X.rank();
                ranks["v_cols"] = sol.X.U.cols();
                ranks["w_cols"] = sol.X.V.cols();
                write_matrix_market(sol.X.U, (out / "V.mtx").string());
                write_matrix_market(sol.X.S, (out / "core.mtx").string());
                write_matrix_market(sol.X.V, (out / "W.mtx").string());
                break;
            }
            case Method::mo_cg:
            case Method::mo_bicgstab: {
                DenseMatrix c = matmul_a_bt(c1, c2);
                DenseSolution sol = method == Method::mo_cg ? matrix_oriented_cg(a, b, c, cfg)
                                                            : matrix_oriented_bicgstab(a, b, c, cfg);
                status = sol.status;
                history = sol.history;
                residual = dense_residual(a, b, c1, c2, sol.X);
                format = "dense";
                ranks["rank"] = std::min(sol.X.rows(), sol.X.cols());
                write_matrix_market(sol.X, (out / "X.mtx").string());
                break;
            }
            default:
                return kExitInputError;
        }

        write_history_csv(history, (out / "history.csv").string());
        meta["format"] = format;
        meta["status"] = to_string(status);
        meta["iterations"] = history.iterations();
        meta["final_true_residual"] = residual;
        meta["ranks"] = ranks;
        meta["timings"]["total_s"] = history.total_time_s;
        meta["timings"]["basic_s"] = history.time_basic_s();
        meta["timings"]["krylov_s"] = history.time_krylov_s();
        meta["timings"]["trunc_s"] = history.time_trunc_s();
        std::ofstream mf(out / "meta.json");
        mf << meta.dump(2) << "\n";
        if (!mf) throw IoError("cannot write meta.json");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    std::cout << "method " << args.method << ": " << to_string(status) << " after "
              << history.iterations() << " iterations, true residual " << residual << "\n";
    return status_exit_code(status);
}

struct BenchArgs {
    std::string example = "ex1";
    std::string scale = "desk";
    std::vector<std::string> methods;
    index_t s = 3;
    std::uint64_t seed = 1234;
    double eps_trunc = 1e-12;
    double tol = 0.0;
    index_t max_iter = 0;
    std::string out_dir = ".";
    bool parallel = false;
};

std::vector<Method> default_methods(ExampleId id) {
    switch (id) {
        case ExampleId::ex1: return {Method::mo_cg, Method::f_cg};
        case ExampleId::ex2: return {Method::mo_bicgstab, Method::f_bicgstab};
        case ExampleId::ex3: return {Method::f_cg, Method::t_cg};
        case ExampleId::ex4: return {Method::f_bicgstab, Method::t_bicgstab};
    }
    return {};
}

int run_bench(const BenchArgs& args) {
    if (args.parallel) enable_parallel_from_env();
    try {
        const ExampleId id = parse_example_id(args.example);
        const BenchScale scale = args.scale == "full" ? BenchScale::full : BenchScale::desk;
        if (args.scale != "full" && args.scale != "desk")
            throw std::invalid_argument("scale must be 'full' or 'desk'");

        std::vector<Method> methods;
        for (const std::string& m : args.methods) methods.push_back(parse_method(m));
        if (methods.empty()) methods = default_methods(id);

        BenchParams params;
        params.s = args.s;
        params.seed = args.seed;
        params.eps_t = args.eps_trunc;
        params.eps_tol_override = args.tol;
        params.max_iter = args.max_iter;

        BenchReport report = run_benchmark(id, scale, methods, params);

        fs::create_directories(args.out_dir);
        const fs::path out(args.out_dir);
        write_bench_json(report, (out / "report.json").string());
        for (const MethodReport& m : report.methods) {
            if (m.status == "error") {
                std::cerr << "method " << m.method << " failed: " << m.error << "\n";
                continue;
            }
            write_history_csv(m.history, (out / ("history_" + m.method + ".csv")).string());
            std::cout << "method " << m.method << ": " << m.status << ", " << m.iterations
                      << " iterations, " << m.total_time_s << " s, true residual "
                      << m.final_true_residual << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

struct CheckArgs {
    std::string solution_dir;
    std::string a_path, b_path, c1_path, c2_path;
};

int run_check(const CheckArgs& args) {
    try {
        const fs::path dir(args.solution_dir);
        std::ifstream mf(dir / "meta.json");
        if (!mf) throw IoError("cannot open " + (dir / "meta.json").string());
        json meta = json::parse(mf);
        const std::string format = meta.at("format").get<std::string>();
        const double eps_tol = meta.at("eps_tol").get<double>();

        SparseMatrix a = read_matrix_market_sparse(args.a_path);
        const bool lyapunov = args.b_path.empty();
        SparseMatrix b = lyapunov ? a.transposed() : read_matrix_market_sparse(args.b_path);
        DenseMatrix c1 = read_matrix_market_dense(args.c1_path);
        DenseMatrix c2 = (lyapunov || args.c2_path.empty()) ? c1
                                                            : read_matrix_market_dense(args.c2_path);

        double residual;
        if (format == "factored") {
            DenseMatrix v = read_matrix_market_dense((dir / "V.mtx").string());
            DenseMatrix core = read_matrix_market_dense((dir / "core.mtx").string());
            DenseMatrix w = read_matrix_market_dense((dir / "W.mtx").string());
            residual = true_residual_factors(a, b, c1, c2, v, core, w);
        } else if (format == "symmetric-factored") {
            DenseMatrix z = read_matrix_market_dense((dir / "Z.mtx").string());
            DenseMatrix d = read_matrix_market_dense((dir / "D.mtx").string());
            residual = true_residual_factors(a, b, c1, c2, z, d, z);
        } else if (format == "dense") {
            DenseMatrix x = read_matrix_market_dense((dir / "X.mtx").string());
            residual = dense_residual(a, b, c1, c2, x);
        } else {
            throw ParseError("meta.json: unknown format '" + format + "'");
        }

        std::cout << residual << "\n";
        return residual <= 10.0 * eps_tol ? kExitOk : kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank Krylov solvers for Sylvester equations A X + X B = C1 C2^T"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Solve an equation given Matrix Market inputs");
    solve->add_option("--A", solve_args.a_path, "Operator A (coordinate .mtx)")->required();
    solve->add_option("--B", solve_args.b_path, "Operator B; omit for Lyapunov mode (B = A^T)");
    solve->add_option("--C1", solve_args.c1_path, "Right-hand side factor C1 (array .mtx)");
    solve->add_option("--C2", solve_args.c2_path, "Right-hand side factor C2 (array .mtx)");
    solve->add_option("--method", solve_args.method,
                      "mo-cg | mo-bicgstab | f-cg | f-bicgstab | t-cg | t-bicgstab");
    solve->add_option("--tol", solve_args.tol, "Relative residual threshold");
    solve->add_option("--eps-trunc", solve_args.eps_trunc, "Truncation threshold (t-* methods)");
    solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap (0 = auto)");
    auto* seed_opt = solve->add_option("--seed", solve_args.seed, "Seed for generated RHS");
    solve->add_option("--random-rhs", solve_args.random_rhs_cols,
                      "Generate C1/C2 with this many columns instead of reading them");
    solve->add_option("--out", solve_args.out_dir, "Output directory")->required();
    solve->add_flag("--parallel", solve_args.parallel, "Opt-in multithreaded kernels");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Run a benchmark example");
    bench->add_option("--example", bench_args.example, "ex1 | ex2 | ex3 | ex4")->required();
    bench->add_option("--scale", bench_args.scale, "full | desk");
    bench->add_option("--methods", bench_args.methods, "Methods to run")->delimiter(',');
    bench->add_option("--s", bench_args.s, "Right-hand side columns");
    bench->add_option("--seed", bench_args.seed, "RHS seed");
    bench->add_option("--eps-trunc", bench_args.eps_trunc, "Truncation threshold");
    bench->add_option("--tol", bench_args.tol, "Override the example's threshold");
    bench->add_option("--max-iter", bench_args.max_iter, "Iteration cap (0 = auto)");
    bench->add_option("--out", bench_args.out_dir, "Output directory")->required();
    bench->add_flag("--parallel", bench_args.parallel, "Opt-in multithreaded kernels");

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "Verify a stored solution's true residual");
    check->add_option("solution_dir", check_args.solution_dir, "Directory written by solve")
        ->required();
    check->add_option("--A", check_args.a_path, "Operator A")->required();
    check->add_option("--B", check_args.b_path, "Operator B (omit for Lyapunov)");
    check->add_option("--C1", check_args.c1_path, "Factor C1")->required();
    check->add_option("--C2", check_args.c2_path, "Factor C2");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        solve_args.seed_set = seed_opt->count() > 0;
        return run_solve(solve_args);
    }
    if (bench->parsed()) return run_bench(bench_args);
    if (check->parsed()) return run_check(check_args);
    return kExitInputError;
}
