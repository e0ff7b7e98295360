#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

int data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int n = -1;  // header
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST(Cli, EpsteinSquareLattice) {
  const auto r = run("epstein --Q identity --r 2 --s 2,0 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("s_re,s_im,value_re,value_im,error_bound"), std::string::npos);
  EXPECT_NE(r.out.find("6.0268120396918"), std::string::npos) << r.out;
}

TEST(Cli, InlineAndFileGramAgree) {
  const auto a = run("epstein --Q '[[2,1],[1,1]]' --s 3");
  const auto b = run("epstein --Q '[2,1,1,1]' --s 3");
  const std::string path = testing::TempDir() + "gram_cli.json";
  if (FILE* f = std::fopen(path.c_str(), "w")) {
    std::fputs("{\"r\": 2, \"Q\": [2, 1, 1, 1]}", f);
    std::fclose(f);
  }
  const auto c = run("epstein --Q @" + path + " --s 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, BadFlagsExitTwo) {
  EXPECT_EQ(run("epstein --bogus").code, 2);
  EXPECT_EQ(run("epstein --s abc").code, 2);
  EXPECT_EQ(run("epstein --s 1").code, 2);  // pole
  EXPECT_EQ(run("epstein --Q '[1,2,3]'").code, 2);
  EXPECT_EQ(run("heegner --D -5").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, ToleranceFailureExitsOne) {
  // The pointwise spacing comparator is not met at 2 %.
  EXPECT_EQ(run("spacing --a 10 --t-min 20 --t-max 50 --tol 0.02").code, 1);
  EXPECT_EQ(run("spacing --a 10 --t-min 20 --t-max 50").code, 0);
}

TEST(Cli, ExoticRootRowsCarryErrorBound) {
  const auto r = run("exotic-roots --a 10 --t-max 20 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("t,lambda,residual,gap,comparator,error_bound", 0), 0u);
  EXPECT_GT(data_rows(r.out), 5);
}

TEST(Cli, JsonReportsOk) {
  const auto r = run("kronecker --z 0.2,1.1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"ok\": true"), std::string::npos);
  EXPECT_NE(r.out.find("\"error_bound\""), std::string::npos);
}

TEST(Cli, DeterministicOutput) {
  const std::string args = "exotic-roots --a 5 --t-max 15 --format csv";
  const auto a = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run(args).out);
}

TEST(Cli, ThreadCapDoesNotChangeOutput) {
  ASSERT_EQ(setenv("AUTOSPEC_THREADS", "1", 1), 0);
  const auto one = run("greens-check --z 0,1 --s 1.5 --a 3 --T 100 --format csv");
  ASSERT_EQ(setenv("AUTOSPEC_THREADS", "4", 1), 0);
  const auto four = run("greens-check --z 0,1 --s 1.5 --a 3 --T 100 --format csv");
  unsetenv("AUTOSPEC_THREADS");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
}

TEST(Cli, SelftestSingleCriterion) {
  const auto r = run("selftest --only 14 --format csv");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("14,"), std::string::npos);
  EXPECT_EQ(run("selftest --only 15").code, 2);
}
