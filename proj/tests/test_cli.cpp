#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

fs::path scratch()
{
    const auto dir = fs::temp_directory_path() / ("rbs_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Run rbs_cli(const std::string& args)
{
    const auto log = scratch() / "stdout.txt";
    const std::string cmd = std::string("\"") + RBS_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

std::string config(const char* name) { return std::string("--config \"") + RBS_CONFIG_DIR + "/" + name + "\""; }

} // namespace

TEST(Cli, CatalanPrintsTheTriangleAndPassesItsIdentities)
{
    const auto dir = scratch() / "catalan";
    const auto run = rbs_cli("catalan --rows 10 --out \"" + dir.string() + "\"");
    ASSERT_EQ(run.code, 0) << run.out;
    std::istringstream lines(run.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        rows.push_back(line);
    }
    ASSERT_GE(rows.size(), 15u);
    std::istringstream tenth(rows[9]);
    std::vector<long long> values;
    for (long long v; tenth >> v;) {
        values.push_back(v);
    }
    EXPECT_EQ(values, (std::vector<long long>{4862, 4862, 3432, 2002, 1001, 429, 154, 44, 9, 1}));
    EXPECT_EQ(run.out.find("FAIL"), std::string::npos);
    const std::string csv = slurp(dir / "catalan.csv");
    EXPECT_EQ(csv.rfind("i,j,C_ij\n1,1,1\n", 0), 0u);
    EXPECT_NE(csv.find("\n10,4,2002\n"), std::string::npos);
}

TEST(Cli, UsageAndConfigErrorsExitWithTwo)
{
    EXPECT_EQ(rbs_cli("").code, 2);
    EXPECT_EQ(rbs_cli("frobnicate").code, 2);
    EXPECT_EQ(rbs_cli("kernel").code, 2);
    EXPECT_EQ(rbs_cli("kernel --config /nonexistent.json").code, 2);
    const auto bad = scratch() / "bad.json";
    std::ofstream(bad) << R"({"epsilon": -1, "R": 1, "lambda": {"kind": "constant", "parameters": 1}})";
    EXPECT_EQ(rbs_cli("kernel --config \"" + bad.string() + "\"").code, 2);
    EXPECT_EQ(rbs_cli("bessel --xmax -1").code, 2);
    EXPECT_EQ(rbs_cli("--help").code, 0);
}

TEST(Cli, NonConvergenceExitsWithThree)
{
    const auto cfg = scratch() / "short.json";
    std::ofstream(cfg) << R"({"epsilon": 1, "R": 1, "lambda": {"kind": "constant", "parameters": 10},
                              "grid": {"N_kernel": 20}, "solver": {"max_iter": 2}})";
    EXPECT_EQ(rbs_cli("kernel --config \"" + cfg.string() + "\" --out \"" + (scratch() / "k").string() + "\"").code, 3);
}

TEST(Cli, VerifyPassesOnTheConstantSample)
{
    const auto run = rbs_cli("verify " + config("constant_lambda10.json"));
    EXPECT_EQ(run.code, 0) << run.out;
    EXPECT_NE(run.out.find("PASS"), std::string::npos);
    EXPECT_EQ(run.out.find("FAIL"), std::string::npos) << run.out;
}

TEST(Cli, KernelOutputIsIndependentOfThreadCount)
{
    const auto one = scratch() / "t1";
    const auto four = scratch() / "t4";
    ASSERT_EQ(rbs_cli("kernel " + config("quadratic_lambda.json") + " --threads 1 --out \"" + one.string() + "\"").code, 0);
    ASSERT_EQ(rbs_cli("kernel " + config("quadratic_lambda.json") + " --threads 4 --out \"" + four.string() + "\"").code, 0);
    for (const char* f : {"kernel_direct.csv", "kernel_inverse.csv"}) {
        const std::string a = slurp(one / f);
        EXPECT_FALSE(a.empty());
        EXPECT_EQ(a, slurp(four / f)) << f;
    }
    EXPECT_NE(slurp(one / "kernel_direct.json").find("\"iterations_used\""), std::string::npos);
}
