#include "gdid/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gdid/dgp.hpp"
#include "gdid/report.hpp"
#include "test_util.hpp"

namespace gdid {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gdid_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  std::string write_data(const std::string& name, const PanelDataset& d) {
    const auto path = dir_ / name;
    std::ofstream out(path);
    write_csv(out, d);
    return path.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  nlohmann::json json() const { return nlohmann::json::parse(out_.str()); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

const char* kFourRow =
    "unit,g,a0,a1,y0,y1\n"
    "a,1,0,1,0,5\n"
    "b,1,0,1,1,8\n"
    "c,0,0,0,2,3\n"
    "d,0,0,0,0,3\n";

TEST_F(CliTest, FourRowCanonical) {
  const auto path = write("four.csv", kFourRow);
  ASSERT_EQ(run({"estimate", "--input", path, "--boot", "99"}), kExitOk) << err_.str();
  const auto j = json();
  EXPECT_EQ(j["schema"], kReportSchema);
  EXPECT_EQ(j["command"], "estimate");
  EXPECT_EQ(j["design"], "Canonical");
  EXPECT_EQ(j["estimand"], "ATT_Period1");
  EXPECT_NEAR(j["value"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(j["inference"]["analytic_se"].get<double>(), std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(j["bounds"].is_null());
  EXPECT_EQ(j["provenance"]["input_sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(j["provenance"]["tool_version"], kToolVersion);
}

TEST_F(CliTest, DeclaredDesignMismatch) {
  const auto path = write("prepost.csv",
                          "unit,g,a0,a1,y0,y1\n"
                          "a,1,0,1,0,5\n"
                          "b,1,0,1,1,8\n"
                          "c,0,0,1,2,3\n"
                          "d,0,0,1,0,3\n");
  EXPECT_EQ(run({"estimate", "--input", path, "--design", "canonical", "--boot", "9"}),
            kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "DesignMismatch");
  EXPECT_NE(err_.str().find("DesignMismatch"), std::string::npos);
}

TEST_F(CliTest, IpwWithoutCovariatesEqualsSimple) {
  DgpSpec spec;
  spec.n1 = 120;
  spec.n0 = 80;
  spec.tau(1, 1) = 1.0;
  const auto path = write_data("dgp.csv", generate(spec, 6));
  ASSERT_EQ(run({"estimate", "--input", path, "--boot", "49"}), kExitOk);
  const double simple = json()["value"].get<double>();
  ASSERT_EQ(run({"estimate", "--input", path, "--boot", "49", "--method", "ipw"}), kExitOk);
  const auto j = json();
  EXPECT_NEAR(j["value"].get<double>(), simple, 1e-10);
  EXPECT_EQ(j["estimand"], "EffectModification");
  EXPECT_EQ(j["method"], "ipw");
}

TEST_F(CliTest, ReportsAreByteIdentical) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 60;
  spec.n_pre_periods = 2;
  const auto path = write_data("dgp.csv", generate(spec, 2));
  const std::vector<std::string> args = {"estimate", "--input", path, "--boot", "99",
                                         "--seed", "5", "--pre-cols", "y_m2,y_m1"};
  ASSERT_EQ(run(args), kExitOk) << out_.str();
  const std::string first = out_.str();
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  ASSERT_EQ(run(threaded), kExitOk);
  auto j1 = nlohmann::json::parse(first);
  auto j2 = json();
  // Only the recorded configuration differs.
  j1.erase("provenance");
  j2.erase("provenance");
  EXPECT_EQ(j1.dump(), j2.dump());
  ASSERT_EQ(run(args), kExitOk);
  EXPECT_EQ(out_.str(), first);
  EXPECT_TRUE(json()["diagnostics"]["assessable"].get<bool>());
}

TEST_F(CliTest, BoundsBlock) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 50;
  const auto path = write_data("dgp.csv", generate(spec, 1));
  ASSERT_EQ(run({"estimate", "--input", path, "--boot", "49", "--bounds=-1,2"}), kExitOk)
      << out_.str();
  const auto j = json();
  const double v = j["value"].get<double>();
  EXPECT_EQ(j["bounds"]["estimand"], "BoundedATT");
  EXPECT_DOUBLE_EQ(j["bounds"]["lower"].get<double>(), v - 1.0);
  EXPECT_DOUBLE_EQ(j["bounds"]["upper"].get<double>(), v + 2.0);

  const auto four = write("four.csv", kFourRow);
  EXPECT_EQ(run({"estimate", "--input", four, "--boot", "9", "--bounds=0,1"}), kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "BoundsNotApplicable");
  EXPECT_EQ(run({"estimate", "--input", path, "--boot", "9", "--bounds=1,0"}), kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "InvalidBounds");
}

TEST_F(CliTest, CategoricalContrasts) {
  const auto path = write("cat.csv",
                          "unit,g,a0,a1,y0,y1\n"
                          "a,low,0,1,0,1\n"
                          "b,low,0,1,0,3\n"
                          "c,mid,0,1,0,4\n"
                          "d,mid,0,1,0,6\n"
                          "e,high,0,1,0,9\n"
                          "f,high,0,1,0,11\n");
  ASSERT_EQ(run({"estimate", "--input", path, "--group-type", "categorical", "--reference",
                 "low", "--boot", "19"}),
            kExitOk)
      << out_.str();
  const auto j = json();
  ASSERT_EQ(j["contrasts"].size(), 2u);
  for (const auto& c : j["contrasts"]) {
    const std::string level = c["contrast_levels"]["level"];
    EXPECT_EQ(c["contrast_levels"]["reference"], "low");
    EXPECT_DOUBLE_EQ(c["value"].get<double>(), level == "mid" ? 3.0 : 8.0);
  }
}

TEST_F(CliTest, DoseContrast) {
  std::string csv = "unit,g,a0,a1,y0,y1\n";
  for (int i = 0; i < 20; ++i) {
    csv += "u" + std::to_string(i) + "," + std::to_string(0.25 * i) + ",0,1,1," +
           std::to_string(1 + 0.5 * i) + "\n";
  }
  const auto path = write("dose.csv", csv);
  // delta = 2 G exactly.
  ASSERT_EQ(run({"estimate", "--input", path, "--group-type", "numeric", "--method",
                 "continuous", "--contrast", "3,1", "--boot", "19"}),
            kExitOk)
      << out_.str();
  EXPECT_NEAR(json()["value"].get<double>(), 4.0, 1e-10);
  EXPECT_EQ(run({"estimate", "--input", path, "--group-type", "numeric", "--method",
                 "continuous", "--contrast", "9,1", "--boot", "19"}),
            kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "ExtrapolationWarning");
}

TEST_F(CliTest, Pretrends) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 40;
  spec.design = DesignKind::NoPrePeriod;
  const auto nopre = write_data("nopre.csv", generate(spec, 3));
  ASSERT_EQ(run({"pretrends", "--input", nopre, "--boot", "19"}), kExitOk) << out_.str();
  auto j = json();
  EXPECT_EQ(j["command"], "pretrends");
  EXPECT_FALSE(j["assessable"].get<bool>());
  EXPECT_FALSE(j.contains("pooled_gap"));

  spec.design = DesignKind::PrePost;
  const auto no_pre_cols = write_data("prepost.csv", generate(spec, 3));
  EXPECT_EQ(run({"pretrends", "--input", no_pre_cols, "--boot", "19"}), kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "InsufficientPrePeriods");

  spec.n_pre_periods = 3;
  const auto with_pre = write_data("pre.csv", generate(spec, 3));
  ASSERT_EQ(run({"pretrends", "--input", with_pre, "--boot", "99", "--pre-cols",
                 "y_m3,y_m2,y_m1"}),
            kExitOk);
  j = json();
  EXPECT_TRUE(j["assessable"].get<bool>());
  EXPECT_EQ(j["per_period_gap"].size(), 3u);
}

TEST_F(CliTest, Simulate) {
  const auto spec = write("world.txt",
                          "design = prepost\nn1 = 200\nn0 = 200\ntau11 = 2\ntau01 = 0.5\n");
  ASSERT_EQ(run({"simulate", "--spec", spec, "--reps", "40", "--seed", "3"}), kExitOk)
      << out_.str();
  const auto j = json();
  EXPECT_EQ(j["truth"]["true_estimand"].get<double>(), 1.5);
  EXPECT_EQ(j["summary"]["reps"], 40);
  EXPECT_TRUE(j["summary"]["coverage"].is_null());

  EXPECT_EQ(run({"simulate", "--spec", spec, "--reps", "1"}), kExitInvalid);
  const auto bad = write("bad.txt", "design = prepost\nflavour = 3\n");
  EXPECT_EQ(run({"simulate", "--spec", bad}), kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "InvalidSpec");
}

TEST_F(CliTest, ParseAndNumericalFailures) {
  const auto bad = write("bad.csv", "unit,g,a0,a1,y0,y1\na,1,0,1,0,5\nb,0,0,1,abc,8\n");
  EXPECT_EQ(run({"estimate", "--input", bad}), kExitInvalid);
  auto j = json();
  EXPECT_EQ(j["error"]["code"], "ParseError");
  EXPECT_EQ(j["error"]["row"], 2);

  EXPECT_EQ(run({"estimate", "--input", (dir_ / "missing.csv").string()}), kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "IoError");
  EXPECT_EQ(run({"estimate"}), kExitInvalid);
  EXPECT_EQ(json()["error"]["code"], "UsageError");
  EXPECT_EQ(run({"--help"}), kExitOk);

  std::string csv = "unit,g,a0,a1,y0,y1,x\n";
  for (int i = 0; i < 10; ++i) {
    csv += "u" + std::to_string(i) + "," + (i < 5 ? "1" : "0") + ",0,1,0," +
           std::to_string(i) + "," + std::to_string(i < 5 ? i + 10 : -i) + "\n";
  }
  const auto separated = write("sep.csv", csv);
  EXPECT_EQ(run({"estimate", "--input", separated, "--method", "ipw", "--covariates", "x",
                 "--boot", "9"}),
            kExitNumerical);
  EXPECT_EQ(json()["error"]["code"], "Separation");
}

TEST(Interpretation, PrePostPhrasing) {
  InterpretationLabels labels;
  labels.treatment_name = "Covid-19";
  labels.outcome_name = "UHC";
  labels.group1_name = "lower-income countries";
  labels.group0_name = "higher-income countries";
  labels.unit = "percentage points";
  labels.verb = "reduce";
  const std::string s = render_interpretation(DesignKind::PrePost, EstimandKind::EffectModification,
                                              1.14, {0.39, 1.90}, labels);
  EXPECT_NE(s.find("1.14 fewer percentage points"), std::string::npos) << s;
  EXPECT_NE(s.find("(95% CI: 0.39, 1.90)"), std::string::npos) << s;
  EXPECT_EQ(s.front(), 'C');
}

TEST(Interpretation, NoPrePeriodPhrasing) {
  InterpretationLabels labels;
  labels.treatment_name = "UHC";
  labels.outcome_name = "service coverage";
  labels.group1_name = "adopting countries";
  labels.unit = "percentage points";
  labels.verb = "increase";
  const std::string s = render_interpretation(
      DesignKind::NoPrePeriod, EstimandKind::ATTChangeOverTime, 1.14, {0.39, 1.90}, labels);
  EXPECT_NE(s.find("1.14 additional percentage points"), std::string::npos) << s;
  EXPECT_NE(s.find("(95% CI: 0.39, 1.90)"), std::string::npos) << s;
}

TEST(Interpretation, ZeroAndLevel) {
  const std::string s = render_interpretation(DesignKind::PrePost, EstimandKind::EffectModification,
                                              0.001, {-0.5, 0.5});
  EXPECT_NE(s.find("no estimated difference"), std::string::npos) << s;
  EXPECT_NE(s.find("(95% CI: -0.50, 0.50)"), std::string::npos) << s;
  const std::string t = render_interpretation(DesignKind::Canonical, EstimandKind::ATT_Period1, -2.0,
                                              {-3.0, -1.0}, {}, 0.9);
  EXPECT_NE(t.find("(90% CI: -3.00, -1.00)"), std::string::npos) << t;
  EXPECT_NE(t.find("reduce"), std::string::npos) << t;
}

}  // namespace
}  // namespace gdid
