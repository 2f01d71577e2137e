#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + (env.empty() ? "" : " ") + EDM_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {};
  CliResult res;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    res.out.append(buf, got);
  }
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  EXPECT_TRUE(is.good()) << path;
  json j;
  is >> j;
  return j;
}

TEST(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run_cli("--help").exit_code, 0);
  EXPECT_EQ(run_cli("compare --help").exit_code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").exit_code, 2);                     // subcommand required
  EXPECT_EQ(run_cli("no-such-command").exit_code, 2);
  EXPECT_EQ(run_cli("eval-w --M 3 --N 2").exit_code, 2);   // missing --x
  EXPECT_EQ(run_cli("compare --M 3 --N 2 --x 1,3 --format yaml").exit_code, 2);
  EXPECT_EQ(run_cli("suite --Mmax 0").exit_code, 2);
  // Explicit parameters need --u, --v and --a12-re together.
  EXPECT_EQ(
      run_cli("eval-w --M 2 --N 1 --x 2 --u 0.1,0.0").exit_code, 2);
  // Odd-length flat list is not a list of re,im pairs.
  EXPECT_EQ(run_cli("eval-w --M 2 --N 1 --x 2 --u 0.1,0.0,0.3 "
                    "--v 0.0,0.0,0.2,0.1 --a12-re 0.4")
                .exit_code,
            2);
  // Malformed spec: x outside [1, m].
  EXPECT_EQ(run_cli("eval-w --M 2 --N 1 --x 5 --seed 1").exit_code, 2);
}

TEST(Cli, CompareReportsMatchingRoutes) {
  const CliResult res = run_cli("compare --M 3 --N 2 --x 1,3 --seed 5");
  ASSERT_EQ(res.exit_code, 0);
  const json j = json::parse(res.out);
  EXPECT_EQ(j.at("command").get<std::string>(), "compare");
  EXPECT_EQ(j.at("M").get<int>(), 3);
  EXPECT_EQ(j.at("N").get<int>(), 2);
  EXPECT_EQ(j.at("x").get<std::vector<int>>(), (std::vector<int>{1, 3}));
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_LT(j.at("residual").get<double>(), j.at("tol").get<double>());
  EXPECT_TRUE(j.at("W").contains("re"));
  EXPECT_TRUE(j.at("G").contains("im"));
  EXPECT_EQ(j.at("u").size(), 2u);
  EXPECT_EQ(j.at("v").size(), 3u);
}

TEST(Cli, ParamsFileRoundTripIsExact) {
  const std::string params = temp_path("cli_params.json");
  const std::string out1 = temp_path("cli_w1.json");
  const std::string out2 = temp_path("cli_w2.json");
  const std::string base = "--M 3 --N 2 --x 1,3";

  ASSERT_EQ(run_cli("eval-w " + base + " --seed 7 --dump-params " + params +
                    " --out " + out1)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("eval-w " + base + " --params-file " + params + " --out " +
                    out2)
                .exit_code,
            0);

  const json j1 = read_json_file(out1);
  const json j2 = read_json_file(out2);
  // The dump serializes doubles losslessly, so the two runs are bit-equal.
  EXPECT_EQ(j1.at("W").at("re").get<double>(), j2.at("W").at("re").get<double>());
  EXPECT_EQ(j1.at("W").at("im").get<double>(), j2.at("W").at("im").get<double>());

  // No temporary file may survive the atomic write.
  EXPECT_FALSE(std::filesystem::exists(out1 + ".tmp"));
  EXPECT_FALSE(std::filesystem::exists(params + ".tmp"));

  const CliResult g = run_cli("eval-g " + base + " --params-file " + params);
  ASSERT_EQ(g.exit_code, 0);
  const json jg = json::parse(g.out);
  const double w_re = j1.at("W").at("re").get<double>();
  const double w_im = j1.at("W").at("im").get<double>();
  const double g_re = jg.at("G").at("re").get<double>();
  const double g_im = jg.at("G").at("im").get<double>();
  const double num = std::hypot(w_re - g_re, w_im - g_im);
  const double den = std::max(std::hypot(w_re, w_im), std::hypot(g_re, g_im));
  EXPECT_LT(num / den, 1e-8);
}

TEST(Cli, ExplicitParametersAreHonored) {
  const CliResult res = run_cli(
      "eval-w --M 2 --N 1 --x 2 --u=0.23,0.11 --v=-0.05,0.03,0.13,-0.07 "
      "--a12-re 0.4 --a12-im 0.2");
  ASSERT_EQ(res.exit_code, 0);
  const json j = json::parse(res.out);
  EXPECT_EQ(j.at("u").at(0).at("re").get<double>(), 0.23);
  EXPECT_EQ(j.at("v").at(1).at("re").get<double>(), 0.13);
  EXPECT_EQ(j.at("a12").at("im").get<double>(), 0.2);
}

TEST(Cli, SuiteOnOneSpecEmitsCleanJsonl) {
  const std::string out = temp_path("cli_suite.jsonl");
  const CliResult res =
      run_cli("suite --M 3 --N 2 --x 1,3 --seeds 2 --out " + out);
  ASSERT_EQ(res.exit_code, 0);
  std::ifstream is(out);
  ASSERT_TRUE(is.good());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    const json j = json::parse(line);
    const std::string status = j.at("status").get<std::string>();
    EXPECT_TRUE(status == "pass" || status == "skip") << line;
    ++lines;
  }
  EXPECT_EQ(lines, 30u);  // 15 checks x 2 seeds
}

TEST(Cli, SuiteCsvFormat) {
  const CliResult res =
      run_cli("suite --M 2 --N 1 --x 2 --seeds 1 --format csv");
  ASSERT_EQ(res.exit_code, 0);
  std::istringstream rows(res.out);
  std::string header;
  ASSERT_TRUE(std::getline(rows, header));
  EXPECT_EQ(header, "check_id,M,N,x,seed,residual,tol,status,ms");
}

TEST(Cli, SweepAndYbrPass) {
  const CliResult sweep = run_cli("sweep --Mmax 2 --Nmax 2 --seeds 1");
  EXPECT_EQ(sweep.exit_code, 0);
  const CliResult ybr = run_cli("ybr --seeds 5");
  ASSERT_EQ(ybr.exit_code, 0);
  std::istringstream lines(ybr.out);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    EXPECT_EQ(j.at("check_id").get<std::string>(), "ybr.hexagon");
    EXPECT_EQ(j.at("status").get<std::string>(), "pass");
    ++n;
  }
  EXPECT_EQ(n, 5u);
}

TEST(Cli, EnumerationCapEnvironmentOverride) {
  // A cap of one chain forces every brute-force route into a skip.
  const CliResult res = run_cli("suite --M 3 --N 2 --x 1,3 --seeds 1",
                                "ELLIPTIC_DM_MAX_ENUM=1");
  ASSERT_EQ(res.exit_code, 0);
  std::istringstream lines(res.out);
  std::string line;
  bool saw_bf_skip = false;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    if (j.at("check_id").get<std::string>() == "theorem.wbf_vs_wdp") {
      saw_bf_skip = j.at("status").get<std::string>() == "skip";
    }
  }
  EXPECT_TRUE(saw_bf_skip);
}

}  // namespace
