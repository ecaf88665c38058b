#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "hazmix_cli_test.log";
    const std::string cmd = std::string(HAZMIX_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hazmix_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kSmallFit = "--iters 40 --burnin 10 --q 6 --N 4 --samples 500";

}  // namespace

TEST(Cli, UsageErrorsExitWithOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("fit --data builtin:leukemia-treatment --N 1").code, 1);
    EXPECT_EQ(run("fit").code, 1);
    EXPECT_EQ(run("fit --data builtin:nope").code, 1);
    EXPECT_EQ(run("fit --simulate weibull-mix:n=abc").code, 1);
    EXPECT_EQ(run("km --data /nonexistent/file.csv").code, 1);
}

TEST(Cli, EmptyDatasetIsRejected) {
    const auto dir = scratch("empty");
    std::ofstream(dir / "empty.csv") << "time,event\n";
    const auto r = run("fit --data " + (dir / "empty.csv").string() + " --out " + dir.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("no rows"), std::string::npos);
}

TEST(Cli, KaplanMeierOnPlacebo) {
    const auto dir = scratch("km");
    const auto r = run("km --data builtin:leukemia-placebo --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("median 8"), std::string::npos);
    EXPECT_EQ(first_line(dir / "km.csv"), "time,survival,at_risk,events");
    const std::string body = slurp(dir / "km.csv");
    EXPECT_NE(body.find("\n0,1,20,0\n"), std::string::npos);
    const auto row = body.find("\n8,");
    ASSERT_NE(row, std::string::npos);
    const std::string line = body.substr(row + 1, body.find('\n', row + 1) - row - 1);
    EXPECT_NEAR(std::stod(line.substr(2)), 0.4, 1e-12);
    EXPECT_EQ(line.substr(line.size() - 5), ",11,3");
}

TEST(Cli, AllCensoredKaplanMeierStaysAtOne) {
    const auto dir = scratch("censored");
    std::ofstream(dir / "c.csv") << "time,event\n1,0\n2,0\n";
    ASSERT_EQ(run("km --data " + (dir / "c.csv").string() + " --out " + dir.string()).code, 0);
    EXPECT_EQ(slurp(dir / "km.csv"), "time,survival,at_risk,events\n0,1,2,0\n");
}

TEST(Cli, FitWritesHeadersAndIsDeterministic) {
    const auto a = scratch("fit_a"), b = scratch("fit_b");
    const std::string args = "fit --data builtin:leukemia-treatment --trace --seed 9 " + kSmallFit;
    ASSERT_EQ(run(args + " --out " + a.string()).code, 0);
    ASSERT_EQ(run(args + " --out " + b.string()).code, 0);
    EXPECT_EQ(first_line(a / "summary.csv"), "t,mean,median,mode,hpd_lo,hpd_hi,marg_lo,marg_hi,c_i");
    EXPECT_EQ(first_line(a / "moments.csv"), "t,mu_1,mu_2,mu_3,mu_4");
    EXPECT_EQ(first_line(a / "trace.csv"), "l,c,beta,k");
    for (const char* f : {"summary.csv", "moments.csv", "trace.csv", "median_survival.json", "summary.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_NE(slurp(a / "median_survival.json").find("\"m_hat\""), std::string::npos);
}

TEST(Cli, FitOnCsvInput) {
    const auto dir = scratch("csv");
    std::ofstream(dir / "d.csv") << "time,event\n1.5,1\n0.7,1\n2.2,0\n0.4,1\n";
    const auto r = run("fit --data " + (dir / "d.csv").string() + " --out " + dir.string() + " " + kSmallFit);
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("median survival"), std::string::npos);
    // Default grid for CSV input spans twice the largest time.
    EXPECT_NE(slurp(dir / "summary.csv").find("\n4.4,"), std::string::npos);
}
