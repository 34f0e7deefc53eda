#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string output;
};

const fs::path& work_dir() {
    static const fs::path d = [] {
        // Per process, so ctest -j runs do not share scratch space.
        fs::path p = fs::temp_directory_path() / ("ave_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliRun ave(const std::string& args) {
    static int counter = 0;
    const fs::path log = work_dir() / ("out" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(AVE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

/// Value printed after "key " on its own line, or "" when absent.
std::string field(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
    }
    return "";
}

std::string dir(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST(Cli, GenerateTridiagAndSolve) {
    CliRun g = ave("generate --family tridiag8 --n 1000 --out " + dir("tri"));
    ASSERT_EQ(g.code, 0) << g.output;
    EXPECT_NEAR(std::stod(field(g.output, "sigma_min_achieved")), 6.0, 1e-4);
    EXPECT_TRUE(fs::exists(dir("tri") + "/manifest.json"));

    CliRun s = ave("solve --method drs --problem " + dir("tri") + " --out " + dir("tri_sol"));
    ASSERT_EQ(s.code, 0) << s.output;
    EXPECT_EQ(field(s.output, "status"), "Converged");
    const int iters = std::stoi(field(s.output, "iterations"));
    EXPECT_GE(iters, 10);
    EXPECT_LE(iters, 20);
    EXPECT_LT(std::stod(field(s.output, "error_vs_known")), 1e-7);
    EXPECT_TRUE(fs::exists(dir("tri_sol") + "/solution.txt"));
    EXPECT_TRUE(fs::exists(dir("tri_sol") + "/history.csv"));

    CliRun n = ave("solve --method inexact-newton --problem " + dir("tri"));
    ASSERT_EQ(n.code, 0) << n.output;
    EXPECT_NEAR(std::stod(field(n.output, "theta")), 0.2307, 1e-4);
}

TEST(Cli, GenerateRandomMeetsSigmaTarget) {
    CliRun g = ave("generate --family random --n 200 --density 0.1 --sigma-min 3 --seed 7 --out " +
                dir("rnd"));
    ASSERT_EQ(g.code, 0) << g.output;
    EXPECT_GT(std::stod(field(g.output, "sigma_min_achieved")), 3.0);
    EXPECT_NEAR(std::stod(field(g.output, "density_achieved")), 0.1, 0.01);

    CliRun c = ave("check --problem " + dir("rnd"));
    ASSERT_EQ(c.code, 0) << c.output;
    EXPECT_EQ(field(c.output, "regime"), "StrictlyMonotone");
    EXPECT_NEAR(std::stod(field(c.output, "sigma_min")), 3.15, 1e-5);
}

TEST(Cli, GenerateWithoutSizeFails) {
    CliRun g = ave("generate --family tridiag8 --out " + dir("bad"));
    EXPECT_NE(g.code, 0);
    CliRun r = ave("generate --family random --out " + dir("bad2"));
    EXPECT_NE(r.code, 0);
}

TEST(Cli, NoSolutionExitCodes) {
    const fs::path zero = work_dir() / "zero.txt";
    std::ofstream(zero) << "0\n";
    CliRun d = ave("solve --method drs --problem nosol1d --gamma 1 --divergence-threshold 1e3 "
                   "--max-iter 10000 --x0 " + zero.string());
    EXPECT_EQ(d.code, 2) << d.output;
    EXPECT_EQ(field(d.output, "status"), "Diverged");

    CliRun m = ave("solve --method drs --problem nosol1d");
    EXPECT_EQ(m.code, 3) << m.output;
    EXPECT_EQ(field(m.output, "status"), "MaxIterReached");

    CliRun c = ave("check --problem nosol1d");
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(field(c.output, "regime"), "BoundaryMonotone");
    EXPECT_EQ(field(c.output, "banach_nu"), "none");
}

TEST(Cli, ThetaUndefinedIsReported) {
    ASSERT_EQ(ave("generate --family random --n 100 --sigma-min 1.05 --seed 2 --out " + dir("near")).code,
              0);
    CliRun s = ave("solve --method inexact-newton --problem " + dir("near"));
    EXPECT_EQ(s.code, 1);
    EXPECT_NE(s.output.find("ThetaUndefined"), std::string::npos) << s.output;
    // An explicit theta is accepted.
    CliRun t = ave("solve --method inexact-newton --theta 0.01 --problem " + dir("near"));
    EXPECT_EQ(t.code, 0) << t.output;
}

TEST(Cli, OptionConflictsAndUnknownMethod) {
    ASSERT_EQ(ave("generate --family tridiag8 --n 10 --out " + dir("small")).code, 0);
    EXPECT_EQ(ave("solve --method drs --theta 0.1 --problem " + dir("small")).code, 1);
    EXPECT_EQ(ave("solve --method drs --omega 1 --problem " + dir("small")).code, 1);
    EXPECT_EQ(ave("solve --method newton --alpha theoretical --problem " + dir("small")).code, 1);
    EXPECT_EQ(ave("solve --method bogus --problem " + dir("small")).code, 1);
    EXPECT_EQ(ave("solve --method drs --gamma 2.5 --problem " + dir("small")).code, 1);
}

TEST(Cli, ConfigFileAndTrace) {
    ASSERT_EQ(ave("generate --family tridiag8 --n 100 --out " + dir("cfg_p")).code, 0);
    const fs::path cfg = work_dir() / "run.json";
    std::ofstream(cfg) << R"({"method": "sor-like", "omega": 1.0, "epsilon": 1e-10, "seed": 3})";
    const fs::path trace = work_dir() / "trace.csv";
    CliRun s = ave("solve --config " + cfg.string() + " --problem " + dir("cfg_p") + " --trace " +
                trace.string());
    ASSERT_EQ(s.code, 0) << s.output;
    EXPECT_EQ(field(s.output, "method"), "SORlike");
    EXPECT_EQ(field(s.output, "omega"), "1");
    const std::string csv = slurp(trace);
    EXPECT_EQ(csv.rfind("iteration,residual_norm,iterate_norm,inner_iterations\n", 0), 0u);
}

TEST(Cli, BenchIsDeterministicInIterationMode) {
    const std::string common =
        "bench --count 4 --n 60 --density 0.2 --sigma-min 1.05 --seed 5 --repeats 1 "
        "--measure iterations --out ";
    CliRun a = ave(common + dir("bench_a"));
    ASSERT_EQ(a.code, 0) << a.output;
    CliRun b = ave(common + dir("bench_b"));
    ASSERT_EQ(b.code, 0) << b.output;
    for (const char* f : {"ratios.csv", "curves.csv", "summary.csv"}) {
        EXPECT_EQ(slurp(dir("bench_a") + "/" + f), slurp(dir("bench_b") + "/" + f)) << f;
    }
    EXPECT_TRUE(fs::exists(dir("bench_a") + "/records.csv"));
    EXPECT_TRUE(fs::exists(dir("bench_a") + "/bench.json"));
    EXPECT_NE(a.output.find("robustness"), std::string::npos);

    CliRun p = ave("profile --records " + dir("bench_a") + "/records.csv --measure iterations --out " +
                dir("prof"));
    ASSERT_EQ(p.code, 0) << p.output;
    EXPECT_EQ(slurp(dir("prof") + "/ratios.csv"), slurp(dir("bench_a") + "/ratios.csv"));
}

TEST(Cli, MissingProblemIsAnError) {
    CliRun s = ave("solve --method drs --problem " + dir("does_not_exist"));
    EXPECT_EQ(s.code, 1);
    EXPECT_NE(s.output.find("error"), std::string::npos);
}
