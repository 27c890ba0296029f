#include "ccare/cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ccare/problem_io.h"

namespace ccare::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

int reported_iterations(const fs::path& report) {
  std::smatch m;
  const std::string text = slurp(report);
  const std::regex re("iterations: (\\d+)");
  if (!std::regex_search(text, m, re)) return -1;
  return std::stoi(m[1]);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("ccare_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& sub = "") const {
    return (sub.empty() ? dir_ : dir_ / sub).string();
  }

  fs::path dir_;
};

TEST(ParseSpecs, Rho) {
  EXPECT_TRUE(std::holds_alternative<AutoShift>(parse_rho_spec("auto", 2)));
  EXPECT_DOUBLE_EQ(std::get<AutoShift>(parse_rho_spec("auto:0.5", 2)).margin,
                   0.5);
  EXPECT_EQ(std::get<ShiftVector>(parse_rho_spec("1.1", 2)),
            ShiftVector::uniform(2, 1.1));
  EXPECT_EQ(std::get<ShiftVector>(parse_rho_spec("1,2", 2)),
            ShiftVector({1.0, 2.0}));
  EXPECT_THROW(parse_rho_spec("1,2,3", 2), CcareError);
  EXPECT_THROW(parse_rho_spec("-1", 2), CcareError);
  EXPECT_THROW(parse_rho_spec("auto:0", 2), CcareError);
  EXPECT_THROW(parse_rho_spec("fast", 2), CcareError);
}

TEST(ParseSpecs, Init) {
  EXPECT_TRUE(std::holds_alternative<ZeroInit>(parse_init_spec("zero")));
  EXPECT_DOUBLE_EQ(std::get<ScaledIdentityInit>(parse_init_spec("identity:3")).c,
                   3.0);
  EXPECT_THROW(parse_init_spec("identity:-1"), CcareError);
  EXPECT_THROW(parse_init_spec("ones"), CcareError);
  EXPECT_THROW(parse_init_spec("file:/nonexistent/iterates.json"), CcareError);
}

TEST_F(CliTest, SolveMinimal) {
  const Result r = invoke({"solve", "example1", "--variant", "accelerated",
                           "--init", "zero", "--rho", "1.01,1.01", "--out",
                           out()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string report = slurp(dir_ / "report.txt");
  EXPECT_EQ(reported_iterations(dir_ / "report.txt"), 12);
  EXPECT_NE(report.find("converged: true"), std::string::npos);
  EXPECT_NE(report.find("0.28204532"), std::string::npos) << report;
  EXPECT_NE(report.find("0.27641488"), std::string::npos) << report;
  // Header plus N rows per sweep.
  EXPECT_EQ(count_lines(slurp(dir_ / "trace.csv")), 1 + 2 * 12);
}

TEST_F(CliTest, SolveMaximal) {
  const Result r = invoke({"solve", "example1", "--variant", "regular",
                           "--init", "identity:3", "--rho", "1.01,1.01",
                           "--out", out()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string report = slurp(dir_ / "report.txt");
  EXPECT_EQ(reported_iterations(dir_ / "report.txt"), 35);
  for (const char* v : {"0.50718185", "0.24899225", "0.45594482",
                        "0.32609148", "-0.16073063", "0.48929635"}) {
    EXPECT_NE(report.find(v), std::string::npos) << v << "\n" << report;
  }
  EXPECT_EQ(count_lines(slurp(dir_ / "trace.csv")), 1 + 2 * 35);
}

TEST_F(CliTest, SolveInitFromFile) {
  spit(dir_ / "x0.json", R"({"X": [[[3, 0], [0, 3]], [[3, 0], [0, 3]]]})");
  const Result r = invoke({"solve", "example1", "--variant", "regular",
                           "--init", "file:" + (dir_ / "x0.json").string(),
                           "--rho", "1.01", "--out", out("o")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(reported_iterations(dir_ / "o" / "report.txt"), 35);

  spit(dir_ / "x1.json", R"({"X": [[[3, 0], [0, 3]]]})");
  EXPECT_EQ(invoke({"solve", "example1", "--init",
                    "file:" + (dir_ / "x1.json").string(), "--out", out()})
                .code,
            kBadInput);
}

TEST_F(CliTest, SolveUnsolvableExitsNotConverged) {
  // One uncontrolled stable direction per mode; coupling is scaled up until
  // the iteration stops converging.
  int code = kOk;
  double d = 0.5;
  for (; d <= 64.0 && code == kOk; d *= 2.0) {
    std::ostringstream doc;
    doc << R"({"n": 2, "N": 2, "modes": [)";
    for (int i = 0; i < 2; ++i) {
      doc << (i ? ", " : "")
          << R"({"A": [[0, 0], [0, -1]], "B": [[1], [0]], "Q": [[0, 0], [0, 1]]})";
    }
    doc << R"(], "delta": [[0, )" << d << "], [" << d << ", 0]]}";
    spit(dir_ / "p.json", doc.str());
    code = invoke({"solve", (dir_ / "p.json").string(), "--max-iter", "50",
                   "--out", out()})
               .code;
  }
  EXPECT_EQ(code, kNotConverged);
  EXPECT_GT(d, 1.0);
  EXPECT_NE(slurp(dir_ / "report.txt").find("converged: false"),
            std::string::npos);
}

TEST_F(CliTest, SolvePreconditionFailure) {
  EXPECT_EQ(invoke({"solve", "example1", "--rho", "0", "--out", out()}).code,
            kPrecondition);
}

TEST_F(CliTest, CompareIncreasing) {
  const Result r = invoke({"compare", "example1", "--init", "zero", "--rho",
                           "1.5", "--out", out()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(reported_iterations(dir_ / "report_regular.txt"), 17);
  EXPECT_EQ(reported_iterations(dir_ / "report_accelerated.txt"), 14);
  const std::string ordering = slurp(dir_ / "ordering.csv");
  EXPECT_EQ(ordering.rfind("sweep,mode,relation\n", 0), 0u);
  EXPECT_EQ(count_lines(ordering), 1 + 2 * 14);
  EXPECT_NE(r.out.find("conforms"), std::string::npos);
}

TEST_F(CliTest, CompareDecreasing) {
  const Result r = invoke({"compare", "example1", "--init", "identity:3",
                           "--rho", "1.01", "--out", out()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(reported_iterations(dir_ / "report_regular.txt"), 35);
  EXPECT_EQ(reported_iterations(dir_ / "report_accelerated.txt"), 30);
  EXPECT_NE(r.out.find("conforms"), std::string::npos) << r.out;
}

TEST_F(CliTest, CompareSingleMode) {
  spit(dir_ / "one.json", R"({"n": 2, "N": 1,
    "modes": [{"A": [[1, -2], [0, -1]], "B": [[5], [-5]], "Q": [[1, 0], [0, 1]]}],
    "delta": [[0]]})");
  const Result r =
      invoke({"compare", (dir_ / "one.json").string(), "--out", out()});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream rows(slurp(dir_ / "ordering.csv"));
  std::string line;
  std::getline(rows, line);
  int n = 0;
  while (std::getline(rows, line)) {
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "Equal") << line;
    ++n;
  }
  EXPECT_GT(n, 0);
}

TEST_F(CliTest, SweepTables) {
  Result r = invoke({"sweep", "example1", "--init", "zero", "--rho",
                     "1.5;1.1;1.01", "--out", out()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string csv = slurp(dir_ / "sweep.csv");
  EXPECT_EQ(count_lines(csv), 7);
  EXPECT_EQ(csv.rfind("rho,variant,iterations,residual,converged\n", 0), 0u);
  EXPECT_NE(csv.find("1.5 1.5,accelerated,14,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("1.01 1.01,regular,16,"), std::string::npos) << csv;

  r = invoke({"sweep", "example1", "--init", "identity:3", "--rho",
              "1.5;1.1;1.01", "--out", out("t2")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string csv2 = slurp(dir_ / "t2" / "sweep.csv");
  EXPECT_NE(csv2.find("1.5 1.5,regular,42,"), std::string::npos) << csv2;
  EXPECT_NE(csv2.find("1.01 1.01,accelerated,30,"), std::string::npos) << csv2;
}

TEST_F(CliTest, SweepEmptyListIsBadInput) {
  EXPECT_EQ(invoke({"sweep", "example1", "--rho", "", "--out", out()}).code,
            kBadInput);
  EXPECT_EQ(invoke({"sweep", "example1", "--rho", ";", "--out", out()}).code,
            kBadInput);
}

TEST_F(CliTest, SweepRowErrorIsSolverFailure) {
  EXPECT_EQ(
      invoke({"sweep", "example1", "--rho", "1.5;0", "--out", out()}).code,
      kSolverFailure);
  EXPECT_NE(slurp(dir_ / "sweep.csv").find("error"), std::string::npos);
}

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(invoke({"validate", "example1", "--rho", "auto:0.01"}).code, kOk);

  CcareProblem p = builtin_example("example1");
  p.delta(0, 1) = -1.0;
  spit(dir_ / "neg.json", serialize_problem(p));
  const Result neg = invoke({"validate", (dir_ / "neg.json").string()});
  EXPECT_EQ(neg.code, kValidationFailed);
  EXPECT_NE(neg.out.find("delta[1][2]"), std::string::npos) << neg.out;

  const std::string full = serialize_problem(builtin_example("example1"));
  spit(dir_ / "cut.json", full.substr(0, full.size() / 2));
  const Result cut = invoke({"validate", (dir_ / "cut.json").string()});
  EXPECT_EQ(cut.code, kBadInput);
  EXPECT_NE(cut.err.find("line"), std::string::npos) << cut.err;

  // Unshifted example fails detectability in mode 1.
  const Result pbh = invoke({"validate", "example1", "--rho", "0"});
  EXPECT_EQ(pbh.code, kValidationFailed);
  EXPECT_NE(pbh.out.find("detectable"), std::string::npos) << pbh.out;

  EXPECT_EQ(invoke({"validate", (dir_ / "missing.json").string()}).code,
            kBadInput);
}

TEST_F(CliTest, ExampleIsDeterministicAndValid) {
  ASSERT_EQ(invoke({"example", "ivanov_example1", "--out", out("a")}).code, kOk);
  ASSERT_EQ(invoke({"example", "ivanov_example1", "--out", out("b")}).code, kOk);
  const std::string a = slurp(dir_ / "a" / "ivanov_example1.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "ivanov_example1.json"));
  EXPECT_EQ(serialize_problem(parse_problem(a)), a);
  EXPECT_TRUE(validate(parse_problem(a)).empty());
  EXPECT_EQ(invoke({"validate", (dir_ / "a" / "ivanov_example1.json").string()})
                .code,
            kOk);
}

TEST_F(CliTest, ShippedDataMatchesExample) {
  ASSERT_EQ(invoke({"example", "ivanov_example1", "--out", out()}).code, kOk);
  EXPECT_EQ(slurp(fs::path(CCARE_SOURCE_DIR) / "data" / "ivanov_example1.json"),
            slurp(dir_ / "ivanov_example1.json"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({"example", "nope", "--out", out()}).code, kBadInput);
  EXPECT_EQ(invoke({}).code, kBadInput);
  EXPECT_EQ(invoke({"frobnicate"}).code, kBadInput);
  EXPECT_EQ(invoke({"solve", "example1", "--variant", "fast"}).code, kBadInput);
  EXPECT_EQ(invoke({"solve", "example1", "--tol", "abc"}).code, kBadInput);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST_F(CliTest, ExecutableEndToEnd) {
  const std::string cmd = std::string("\"") + CCARE_TOOL_PATH +
                          "\" solve example1 --rho 1.01 --out \"" + out() +
                          "\" > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(reported_iterations(dir_ / "report.txt"), 12);

  const std::string bad = std::string("\"") + CCARE_TOOL_PATH +
                          "\" example nope --out \"" + out() +
                          "\" > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kBadInput);
}

}  // namespace
}  // namespace ccare::cli
