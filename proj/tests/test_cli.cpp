#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hmflow/serialization.hpp"
#include "test_support.hpp"

namespace hmflow::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double field(const std::string& summary, const std::string& key) {
  const auto pos = summary.find(" " + key + "=");
  if (pos == std::string::npos) return NAN;
  return std::stod(summary.substr(pos + key.size() + 2));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hmflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

const std::string kConv21 =
    "target = flat-torus\n"
    "grid_rows = 32\n"
    "grid_cols = 32\n"
    "initial_map = covering\n"
    "degree_p = 2\n"
    "degree_q = 1\n"
    "lattice_a = 0.3\n"
    "lattice_b = 1.4\n"
    "t_max = 20\n"
    "tol_converge = 5e-4\n"
    "trace_cadence = 2000\n";

const std::string kShort =
    "target = flat-torus\n"
    "grid_rows = 16\n"
    "grid_cols = 16\n"
    "initial_map = covering\n"
    "degree_p = 2\n"
    "degree_q = 1\n"
    "perturbation = 0.05\n"
    "seed = 4\n"
    "lattice_a = 0.3\n"
    "lattice_b = 1.4\n"
    "trace_cadence = 25\n"
    "tol_converge = 0\n";

TEST_F(CliTest, VerifyCollarSucceeds) {
  const auto r = invoke({"verify-collar"});
  EXPECT_EQ(r.code, kSuccess) << r.err;
  EXPECT_NE(r.out.find("collar identities: ok"), std::string::npos);
  EXPECT_NE(r.out.find("ell,X,w,integral,bound"), std::string::npos);
}

TEST_F(CliTest, VerifyHarnessesPrintSummaries) {
  const std::vector<std::vector<std::string>> cmds = {
      {"verify-poincare", "--trials", "5", "--grid", "16"},
      {"verify-mollify", "--trials", "2", "--cells", "32", "--eps", "0.1,0.2"},
      {"verify-hopf-identity", "--trials", "3", "--grid", "16", "--target", "sphere:3"},
  };
  for (const auto& c : cmds) {
    const auto r = invoke(c);
    EXPECT_EQ(r.code, kSuccess) << c[0] << ": " << r.err;
    EXPECT_NE(r.out.find("max_ratio="), std::string::npos) << c[0];
    EXPECT_NE(r.out.find(" skipped="), std::string::npos) << c[0];
  }
  const auto m = invoke({"verify-mollify", "--trials", "2", "--cells", "32", "--eps", "0.1,0.2"});
  EXPECT_NE(m.out.find("trials=4 "), std::string::npos);
}

TEST_F(CliTest, VerifyOdesSucceeds) {
  const auto r = invoke({"verify-odes", "--grid", "32", "--decay-grid", "64", "--duration", "0.1"});
  EXPECT_EQ(r.code, kSuccess) << r.out << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kConfigError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kConfigError);
  EXPECT_EQ(invoke({"verify-poincare", "--grid", "1"}).code, kConfigError);
  EXPECT_EQ(invoke({"run"}).code, kConfigError);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
}

TEST_F(CliTest, BadConfigExitsThree) {
  const auto path = write_config("bad.cfg", kShort + "foo = 1\nlattice_b = -1\n");
  const auto r = invoke({"run", "--config", path, "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("'foo'"), std::string::npos);
  EXPECT_NE(r.err.find("lattice_b"), std::string::npos);
  EXPECT_EQ(invoke({"run", "--config", (dir_ / "missing.cfg").string()}).code, kConfigError);
}

TEST_F(CliTest, DegreeTwoOneConvergesToRectangularStructure) {
  const auto path = write_config("conv21.cfg", kConv21);
  const fs::path out = dir_ / "conv";
  const auto r = invoke({"run", "--config", path, "--out", out.string()});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  EXPECT_EQ(r.out.rfind("status=converged", 0), 0u) << r.out;
  EXPECT_NEAR(field(r.out, "b"), 0.5, 0.01);
  EXPECT_NEAR(field(r.out, "a"), 0.0, 0.01);
  // On the grid the covering is conformal at b = sqrt(B / A) with energy
  // sqrt(A B), A and B the discrete squared speeds.
  const auto m = hmflow::testing::covering_moments(2, 1, 32);
  EXPECT_NEAR(field(r.out, "b"), std::sqrt(m.yy / m.xx), 1e-3);
  EXPECT_NEAR(field(r.out, "E"), std::sqrt(m.xx * m.yy), 1e-3);
  EXPECT_LT(field(r.out, "hopf_l1"), 1e-3);
  for (const char* f : {"config.cfg", "trace.csv", "checkpoint.bin", "final_map.bin", "minima.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_EQ(slurp(out / "trace.csv").rfind(std::string(kTraceHeader) + "\n", 0), 0u);
}

TEST_F(CliTest, HundredfoldTimestepAborts) {
  const auto path = write_config("fast.cfg", kShort + "cfl_fraction = 100\nt_max = 1\n");
  const fs::path out = dir_ / "fast";
  const auto r = invoke({"run", "--config", path, "--out", out.string()});
  EXPECT_EQ(r.code, kRuntimeAbort);
  EXPECT_NE(r.err.find("runtime abort"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "abort_state.bin"));
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
}

TEST_F(CliTest, RepeatedRunIsByteIdentical) {
  const auto path = write_config("short.cfg", kShort + "t_max = 0.05\n");
  ASSERT_EQ(invoke({"run", "--config", path, "--out", (dir_ / "a").string()}).code, kSuccess);
  ASSERT_EQ(invoke({"run", "--config", path, "--out", (dir_ / "b").string()}).code, kSuccess);
  const std::string ta = slurp(dir_ / "a" / "trace.csv");
  EXPECT_GT(std::count(ta.begin(), ta.end(), '\n'), 5);
  EXPECT_EQ(ta, slurp(dir_ / "b" / "trace.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "final_map.bin"), slurp(dir_ / "b" / "final_map.bin"));
  // A different seed changes the perturbation and so the trace.
  ASSERT_EQ(invoke({"run", "--config", path, "--seed", "5", "--out", (dir_ / "c").string()}).code,
            kSuccess);
  EXPECT_NE(ta, slurp(dir_ / "c" / "trace.csv"));
}

TEST_F(CliTest, ResumeEqualsUnsplitRun) {
  const auto full = write_config("full.cfg", kShort + "t_max = 0.06\n");
  const auto half = write_config("half.cfg", kShort + "t_max = 0.025\ncheckpoint_cadence = 40\n");
  ASSERT_EQ(invoke({"run", "--config", full, "--out", (dir_ / "full").string()}).code, kSuccess);
  ASSERT_EQ(invoke({"run", "--config", half, "--out", (dir_ / "half").string()}).code, kSuccess);
  const auto r = invoke({"resume", "--checkpoint", (dir_ / "half" / "checkpoint.bin").string(),
                         "--config", full, "--out", (dir_ / "resumed").string()});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  EXPECT_EQ(slurp(dir_ / "resumed" / "trace.csv"), slurp(dir_ / "full" / "trace.csv"));
  EXPECT_EQ(slurp(dir_ / "resumed" / "final_map.bin"), slurp(dir_ / "full" / "final_map.bin"));
}

TEST_F(CliTest, ResumeUsesEmbeddedConfigAndChecksShape) {
  const auto half = write_config("half.cfg", kShort + "t_max = 0.01\n");
  ASSERT_EQ(invoke({"run", "--config", half, "--out", (dir_ / "half").string()}).code, kSuccess);
  const std::string ckpt = (dir_ / "half" / "checkpoint.bin").string();
  EXPECT_EQ(invoke({"resume", "--checkpoint", ckpt, "--out", (dir_ / "again").string()}).code,
            kSuccess);
  std::string other = kShort;
  other.replace(other.find("grid_rows = 16"), 14, "grid_rows = 32");
  const auto mismatch = write_config("other.cfg", other);
  const auto r = invoke({"resume", "--checkpoint", ckpt, "--config", mismatch});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("grid"), std::string::npos);
  EXPECT_EQ(invoke({"resume", "--checkpoint", (dir_ / "nope.bin").string()}).code, kConfigError);
}

}  // namespace
}  // namespace hmflow::cli
