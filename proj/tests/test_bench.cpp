#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "sylkrylov/bench.hpp"

using namespace sylkrylov;
namespace fs = std::filesystem;

TEST(Bench, MethodFamilyValidation) {
    EXPECT_THROW(run_benchmark(ExampleId::ex3, BenchScale::desk, {Method::f_bicgstab}, {}),
                 std::invalid_argument);
    EXPECT_THROW(run_benchmark(ExampleId::ex4, BenchScale::desk, {Method::mo_cg}, {}),
                 std::invalid_argument);
}

TEST(Bench, Ex3DeskIterationCountsAgreeAcrossCgFamily) {
    BenchParams params;
    params.s = 3;
    params.seed = 2024;
    params.eps_t = 1e-12;
    BenchReport report = run_benchmark(ExampleId::ex3, BenchScale::desk,
                                       {Method::mo_cg, Method::f_cg, Method::t_cg}, params);
    ASSERT_EQ(report.methods.size(), 3u);
    for (const auto& m : report.methods) {
        EXPECT_EQ(m.status, "converged") << m.method << ": " << m.error;
        EXPECT_LE(m.final_true_residual, 10.0 * report.eps_tol) << m.method;
    }
    EXPECT_EQ(report.methods[0].iterations, report.methods[1].iterations);
    EXPECT_EQ(report.methods[1].iterations, report.methods[2].iterations);
}

TEST(Bench, Ex1DeskResidualsWithinOneOrder) {
    BenchParams params;
    params.s = 3;
    params.seed = 7;
    BenchReport report =
        run_benchmark(ExampleId::ex1, BenchScale::desk, {Method::mo_cg, Method::f_cg}, params);
    ASSERT_EQ(report.methods.size(), 2u);
    const double r_mo = report.methods[0].final_true_residual;
    const double r_f = report.methods[1].final_true_residual;
    EXPECT_GT(r_mo, 0.0);
    EXPECT_LE(std::max(r_mo, r_f) / std::min(r_mo, r_f), 10.0);
}

TEST(Bench, TimingCategoriesMirrorMethodFamilies) {
    BenchParams params;
    params.s = 2;
    params.seed = 3;
    BenchReport report =
        run_benchmark(ExampleId::ex3, BenchScale::desk, {Method::f_cg, Method::t_cg}, params);
    const MethodReport& f = report.methods[0];
    const MethodReport& t = report.methods[1];
    EXPECT_EQ(f.time_trunc_s, 0.0);
    EXPECT_GT(f.time_krylov_s, 0.0);
    EXPECT_EQ(t.time_krylov_s, 0.0);
    EXPECT_GT(t.time_trunc_s, 0.0);
    // Categories partition measured time.
    EXPECT_LE(f.time_basic_s + f.time_krylov_s + f.time_trunc_s, f.total_time_s * 1.001 + 1e-6);
}

TEST(Bench, FailuresAreRecordedWithoutAborting) {
    BenchParams params;
    params.s = 3;
    params.seed = 5;
    params.max_iter = 2;  // force max_iter status, not an exception
    BenchReport report =
        run_benchmark(ExampleId::ex3, BenchScale::desk, {Method::f_cg, Method::t_cg}, params);
    ASSERT_EQ(report.methods.size(), 2u);
    for (const auto& m : report.methods) EXPECT_EQ(m.status, "max_iter");
}

TEST(Bench, JsonAndCsvSerialization) {
    const fs::path dir =
        fs::temp_directory_path() / ("sylkrylov_bench_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    BenchParams params;
    params.s = 2;
    params.seed = 9;
    BenchReport report = run_benchmark(ExampleId::ex3, BenchScale::desk, {Method::f_cg}, params);
    write_bench_json(report, (dir / "report.json").string());
    write_history_csv(report.methods[0].history, (dir / "history.csv").string());

    std::ifstream jf(dir / "report.json");
    ASSERT_TRUE(jf.good());
    std::string json_text((std::istreambuf_iterator<char>(jf)), std::istreambuf_iterator<char>());
    EXPECT_NE(json_text.find("\"example\": \"ex3\""), std::string::npos);
    EXPECT_NE(json_text.find("\"final_true_residual\""), std::string::npos);

    std::ifstream cf(dir / "history.csv");
    ASSERT_TRUE(cf.good());
    std::string header;
    std::getline(cf, header);
    EXPECT_EQ(header, "iteration,rel_residual,cumulative_time_s,basic_s,krylov_s,trunc_s");
    size_t lines = 0;
    for (std::string line; std::getline(cf, line);) ++lines;
    EXPECT_EQ(lines, report.methods[0].history.records.size());

    fs::remove_all(dir);
}
