#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpfit/report.hpp"

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dpfit_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int cli(const std::string& args) const {
    const std::string cmd = std::string(DPFIT_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

TEST_F(Cli, GenData) {
  EXPECT_EQ(cli("gen-data --family step --k 16 --dims 2 --out " + path("h.csv")), 0);
  const std::string text = read("h.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
  EXPECT_EQ(text.substr(0, 8), "10000,0,");
  EXPECT_EQ(cli("gen-data --family zigzag --out " + path("x.csv")), 1);
}

TEST_F(Cli, RunWritesCsvAndReportRendersIt) {
  write("exp.cfg", "dataset = Level00-1d\nbudget.eps = 1\nalgorithms = ols,nnls\ntrials = 5\nseed = 1\n");
  ASSERT_EQ(cli("run --config " + path("exp.cfg") + " --out " + path("out.csv")), 0);
  const auto rows = dpfit::parse_csv(read("out.csv"));
  EXPECT_EQ(rows.size(), 8u);
  ASSERT_EQ(cli("report --results " + path("out.csv") + " --format md"), 0);
  EXPECT_NE(read("stdout.txt").find("| Level00-1d |"), std::string::npos);
  ASSERT_EQ(cli("run --config " + path("exp.cfg") + " --out " + path("out.md") + " --format md --threads 2"), 0);
  EXPECT_NE(read("out.md").find("### sum Total"), std::string::npos);
}

TEST_F(Cli, UsesFileDatasets) {
  ASSERT_EQ(cli("gen-data --family stair --dims 2 --out " + path("h.csv")), 0);
  write("exp.cfg", "dataset = file\ndataset.path = " + path("h.csv") +
                       "\ndataset.shape = 10x10\nbudget = zcdp\nbudget.rho = 0.5\nalgorithms = seq\ntrials = 3\n");
  EXPECT_EQ(cli("run --config " + path("exp.cfg") + " --out " + path("out.csv")), 0);
  write("bad.csv", "1,2\n3,-4\n");
  write("bad.cfg", "dataset = file\ndataset.path = " + path("bad.csv") +
                       "\ndataset.shape = 2x2\nbudget.eps = 1\nalgorithms = ols\ntrials = 3\n");
  EXPECT_EQ(cli("run --config " + path("bad.cfg") + " --out " + path("out.csv")), 2);
  EXPECT_NE(read("stderr.txt").find("row 2, column 2"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  write("bad.cfg", "dataset = Level00-1d\nalgorithms = ols\n");
  EXPECT_EQ(cli("run --config " + path("bad.cfg") + " --out " + path("o.csv")), 1);
  EXPECT_EQ(cli("run --config " + path("missing.cfg") + " --out " + path("o.csv")), 2);
  write("ok.cfg", "dataset = Level00-1d\nbudget.eps = 1\nalgorithms = ols\ntrials = 2\n");
  EXPECT_EQ(cli("run --config " + path("ok.cfg") + " --out /nonexistent/dir/o.csv"), 2);
  EXPECT_EQ(cli("run --config " + path("ok.cfg") + " --out " + path("o.csv") + " --format xml"), 1);
  write("stuck.cfg", "dataset = Level00-1d\nbudget.eps = 1\nalgorithms = ols,nnls\ntrials = 3\nsolver.max_iters = 1\n");
  EXPECT_EQ(cli("run --config " + path("stuck.cfg") + " --out " + path("s.csv")), 3);
  EXPECT_NE(read("s.csv").find("nnls,sum,Total,nan,nan,0"), std::string::npos);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("--help"), 0);
}

TEST_F(Cli, DemoUncertainty) {
  ASSERT_EQ(cli("demo-uncertainty --d 20 --eps 1 --trials 30"), 0);
  const std::string out = read("stdout.txt");
  EXPECT_NE(out.find("8/eps^2 = 8"), std::string::npos);
  EXPECT_NE(out.find("| clamp |"), std::string::npos);
}

}  // namespace
