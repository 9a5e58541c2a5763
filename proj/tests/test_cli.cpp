#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "sylkrylov/matrix_market.hpp"
#include "sylkrylov/problems.hpp"

using namespace sylkrylov;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SYLKRYLOV_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sylkrylov_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string slurp(const std::string& name) const {
        std::ifstream in(path(name));
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveIdentityLyapunovReportsOneIteration) {
    write_matrix_market(SparseMatrix::identity(4), path("A.mtx"));
    write_matrix_market(random_rhs(4, 2, 5), path("C1.mtx"));
    const int code = run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                             " --method f-cg --out " + path("out"));
    EXPECT_EQ(code, 0);
    const std::string meta = slurp("out/meta.json");
    EXPECT_NE(meta.find("\"iterations\": 1"), std::string::npos) << meta;
    EXPECT_NE(meta.find("\"status\": \"converged\""), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "out/V.mtx"));
    EXPECT_TRUE(fs::exists(dir_ / "out/core.mtx"));
    EXPECT_TRUE(fs::exists(dir_ / "out/W.mtx"));
    EXPECT_TRUE(fs::exists(dir_ / "out/history.csv"));
}

TEST_F(CliTest, SolveDeskScaleExampleReachesTolerance) {
    write_matrix_market(laplacian_2d(30), path("A.mtx"));
    write_matrix_market(random_rhs(900, 3, 17), path("C1.mtx"));
    const int code = run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                             " --method f-cg --tol 1e-6 --out " + path("out"));
    EXPECT_EQ(code, 0);
    // Last history row's rel_residual is below the threshold.
    std::ifstream csv(path("out/history.csv"));
    std::string line, last;
    std::getline(csv, line);  // header
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    const auto c1 = last.find(',');
    const auto c2 = last.find(',', c1 + 1);
    const double rel = std::stod(last.substr(c1 + 1, c2 - c1 - 1));
    EXPECT_LE(rel, 1e-6);
}

TEST_F(CliTest, MissingC1IsInputErrorWithoutOutputs) {
    write_matrix_market(SparseMatrix::identity(4), path("A.mtx"));
    const int code =
        run_cli("solve --A " + path("A.mtx") + " --method f-cg --out " + path("out"));
    EXPECT_EQ(code, 1);
    EXPECT_FALSE(fs::exists(dir_ / "out/meta.json"));
    EXPECT_FALSE(fs::exists(dir_ / "out/V.mtx"));
}

TEST_F(CliTest, CheckFreshSolutionPasses) {
    write_matrix_market(SparseMatrix::identity(4), path("A.mtx"));
    write_matrix_market(random_rhs(4, 2, 6), path("C1.mtx"));
    ASSERT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method f-cg --out " + path("out")),
              0);
    EXPECT_EQ(run_cli("check " + path("out") + " --A " + path("A.mtx") + " --C1 " + path("C1.mtx")),
              0);
}

TEST_F(CliTest, CheckZeroedCoreFails) {
    write_matrix_market(SparseMatrix::identity(4), path("A.mtx"));
    write_matrix_market(random_rhs(4, 2, 7), path("C1.mtx"));
    ASSERT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method f-cg --out " + path("out")),
              0);
    DenseMatrix core = read_matrix_market_dense(path("out/core.mtx"));
    write_matrix_market(DenseMatrix(core.rows(), core.cols()), path("out/core.mtx"));
    EXPECT_EQ(run_cli("check " + path("out") + " --A " + path("A.mtx") + " --C1 " + path("C1.mtx")),
              4);
}

TEST_F(CliTest, BenchUnknownExampleFails) {
    EXPECT_EQ(run_cli("bench --example ex9 --out " + path("bench")), 1);
}

TEST_F(CliTest, BenchWritesHistoriesOfMatchingLength) {
    const int code = run_cli("bench --example ex1 --scale desk --s 2 --seed 3 --out " + path("bench"));
    EXPECT_EQ(code, 0);
    ASSERT_TRUE(fs::exists(dir_ / "bench/report.json"));
    auto count_rows = [&](const std::string& name) {
        std::ifstream csv(path(name));
        std::string line;
        std::getline(csv, line);
        size_t rows = 0;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        return rows;
    };
    const size_t mo = count_rows("bench/history_mo-cg.csv");
    const size_t f = count_rows("bench/history_f-cg.csv");
    EXPECT_LE(mo > f ? mo - f : f - mo, 2u);
}

TEST_F(CliTest, SolveWithGeneratedRhsIsReproducible) {
    write_matrix_market(laplacian_2d(6), path("A.mtx"));
    ASSERT_EQ(run_cli("solve --A " + path("A.mtx") +
                      " --random-rhs 2 --seed 42 --method f-cg --tol 1e-8 --out " + path("o1")),
              0);
    ASSERT_EQ(run_cli("solve --A " + path("A.mtx") +
                      " --random-rhs 2 --seed 42 --method f-cg --tol 1e-8 --out " + path("o2")),
              0);
    EXPECT_EQ(slurp("o1/V.mtx"), slurp("o2/V.mtx"));
    EXPECT_EQ(slurp("o1/core.mtx"), slurp("o2/core.mtx"));
    EXPECT_EQ(slurp("o1/history.csv").substr(0, 40), slurp("o2/history.csv").substr(0, 40));
}

TEST_F(CliTest, DenseSolveRoundTripsThroughCheck) {
    write_matrix_market(laplacian_2d(5), path("A.mtx"));
    write_matrix_market(random_rhs(25, 2, 9), path("C1.mtx"));
    ASSERT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method mo-cg --tol 1e-9 --out " + path("out")),
              0);
    EXPECT_TRUE(fs::exists(dir_ / "out/X.mtx"));
    EXPECT_EQ(run_cli("check " + path("out") + " --A " + path("A.mtx") + " --C1 " + path("C1.mtx")),
              0);
}

TEST_F(CliTest, BreakdownExitCode) {
    // diag(1,2,3) with block size 2: the second block has only one dimension
    // left to fill, a hard breakdown (no deflation).
    write_matrix_market(
        SparseMatrix::from_triplets(3, 3, {0, 1, 2}, {0, 1, 2}, {1.0, 2.0, 3.0}), path("A.mtx"));
    write_matrix_market(random_rhs(3, 2, 13), path("C1.mtx"));
    EXPECT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method f-cg --tol 1e-12 --out " + path("out")),
              3);
}

TEST_F(CliTest, MaxIterExitCode) {
    write_matrix_market(laplacian_2d(10), path("A.mtx"));
    write_matrix_market(random_rhs(100, 2, 10), path("C1.mtx"));
    EXPECT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method f-cg --tol 1e-12 --max-iter 2 --out " + path("out")),
              2);
    // Outputs are still written for inspection.
    EXPECT_TRUE(fs::exists(dir_ / "out/meta.json"));
}

TEST_F(CliTest, ParallelFlagSmoke) {
    write_matrix_market(laplacian_2d(8), path("A.mtx"));
    write_matrix_market(random_rhs(64, 2, 11), path("C1.mtx"));
    EXPECT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method f-cg --parallel --out " + path("out")),
              0);
}

TEST_F(CliTest, TruncatedSolveRoundTripsThroughCheck) {
    write_matrix_market(laplacian_2d(8), path("A.mtx"));
    write_matrix_market(random_rhs(64, 2, 11), path("C1.mtx"));
    ASSERT_EQ(run_cli("solve --A " + path("A.mtx") + " --C1 " + path("C1.mtx") +
                      " --method t-cg --tol 1e-7 --eps-trunc 1e-12 --out " + path("out")),
              0);
    EXPECT_TRUE(fs::exists(dir_ / "out/Z.mtx"));
    EXPECT_TRUE(fs::exists(dir_ / "out/D.mtx"));
    EXPECT_EQ(run_cli("check " + path("out") + " --A " + path("A.mtx") + " --C1 " + path("C1.mtx")),
              0);
}
