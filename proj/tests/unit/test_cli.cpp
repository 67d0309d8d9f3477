#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pyramid/experiment.hpp"

namespace pyramid::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pyramid-sim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pyramid-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }
  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(CliTest, TheoryCheckMatches) {
  const auto r = invoke({"theory-check", "--seed", "7"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("r_mf sim="), std::string::npos);
  EXPECT_NE(r.out.find("MATCH"), std::string::npos);
  EXPECT_EQ(r.out.find("MISMATCH"), std::string::npos);
}

TEST_F(CliTest, TheoryCheckWithBatchConfig) {
  const auto cfg = write("batch.cfg", "[plan]\nkind = batch\nd_buy = 3\nd_sell = 2\n");
  const auto r = invoke({"theory-check", "--config", cfg, "--seed", "11"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("plan=batch"), std::string::npos);
}

TEST_F(CliTest, MissingConfigNamesPath) {
  const auto missing = (dir_ / "nope.cfg").string();
  const auto r = invoke({"sweep-order-size", "--config", missing});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, BadConfigIsAConfigError) {
  const auto cfg = write("bad.cfg", "[population]\nratio = x\n");
  EXPECT_EQ(invoke({"single-run", "--config", cfg}).code, kConfigError);
  EXPECT_EQ(invoke({"no-such-command"}).code, kConfigError);
  EXPECT_EQ(invoke({}).code, kConfigError);
}

TEST_F(CliTest, SweepKindMustMatchSubcommand) {
  const auto cfg = write("batch.cfg", "[plan]\nkind = batch\n");
  const auto r = invoke({"sweep-order-size", "--config", cfg});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("single"), std::string::npos);
}

TEST_F(CliTest, SingleRunPrintsTraceAndSummary) {
  const auto r = invoke({"single-run", "--seed", "3"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("fill period=1 seq=0 buyer=mf seller=", 0), 0u);
  EXPECT_NE(r.out.find("fill period=2 "), std::string::npos);
  const auto header = r.out.find(pyramid::csv_header());
  ASSERT_NE(header, std::string::npos);
  EXPECT_NE(r.out.find("\n0,0.40000000000000002,none,single,2000,1,1,0,", header),
            std::string::npos);
}

TEST_F(CliTest, SweepWritesReproducibleCsv) {
  const auto cfg = write("sweep.cfg",
                         "[population]\nratio = 0.4, 1.6\n[plan]\nn_mf = 50, 400\n"
                         "[run]\nrepetitions = 2\n");
  const auto a = (dir_ / "a.csv").string();
  const auto b = (dir_ / "b.csv").string();
  auto r = invoke({"sweep-order-size", "--config", cfg, "--out", a, "--seed", "5", "--workers", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("wrote 8 runs"), std::string::npos);
  r = invoke({"sweep-order-size", "--config", cfg, "--out", b, "--seed", "5", "--workers", "2"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());

  r = invoke({"sweep-order-size", "--config", cfg, "--out", b, "--seed", "6", "--reps", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(slurp(a), slurp(b));
}

TEST_F(CliTest, PeriodSweep) {
  const auto cfg = write("grid.cfg",
                         "[plan]\nkind = batch\nd_buy = 1,2\nd_sell = 1,2\n[run]\nrepetitions = 1\n");
  const auto out = (dir_ / "grid.csv").string();
  const auto r = invoke({"sweep-periods", "--config", cfg, "--out", out});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream lines(slurp(out));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST_F(CliTest, UnwritableOutput) {
  const auto r = invoke({"sweep-order-size", "--reps", "1", "--out", "/nonexistent/x/out.csv"});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("/nonexistent/x/out.csv"), std::string::npos);
}

TEST_F(CliTest, Help) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("theory-check"), std::string::npos);
}

}  // namespace
}  // namespace pyramid::cli
