#include "gdid/dgp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gdid/error.hpp"

namespace gdid {
namespace {

DgpSpec noiseless(DesignKind design) {
  DgpSpec spec;
  spec.n1 = 30;
  spec.n0 = 20;
  spec.sigma = 0.0;
  spec.design = design;
  spec.alpha1 = 3.0;
  spec.alpha0 = -1.0;
  spec.delta = 0.25;
  return spec;
}

EstimatorFn simple_for(DesignKind design) {
  return [design](const PanelDataset& d) { return gdid_simple(d, design); };
}

TEST(Generate, NoiselessNullWorld) {
  const auto d = generate(noiseless(DesignKind::PrePost), 1);
  EXPECT_TRUE((d.delta().array() == 0.25).all());
  EXPECT_EQ(gdid_simple(d, DesignKind::PrePost).value, 0.0);
}

TEST(Generate, NoiselessEffectModification) {
  auto spec = noiseless(DesignKind::PrePost);
  spec.tau(1, 1) = 2.0;
  spec.tau(0, 1) = 0.5;
  const auto d = generate(spec, 1);
  // Oracle: G1 delta = 0.25 + 2, G0 delta = 0.25 + 0.5.
  EXPECT_EQ(gdid_simple(d, DesignKind::PrePost).value, 1.5);
}

TEST(Generate, LayoutMatchesDesign) {
  for (DesignKind design : {DesignKind::Canonical, DesignKind::PrePost, DesignKind::NoPrePeriod}) {
    DgpSpec spec;
    spec.n1 = 15;
    spec.n0 = 25;
    spec.design = design;
    spec.n_pre_periods = 2;
    const auto d = generate(spec, 9);
    EXPECT_EQ(detect_design(d), design);
    EXPECT_EQ(d.size(), 40);
    EXPECT_EQ(d.count_group(1.0), 15);
    EXPECT_EQ(d.unit_id(0), "u1");
    EXPECT_EQ(d.group()[0], 1.0);
    EXPECT_EQ(d.pre_period_names(), (std::vector<std::string>{"y_m2", "y_m1"}));
  }
}

TEST(Generate, Deterministic) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 100;
  spec.z = CovariateMechanism{0.5, 1.0};
  spec.noise_correlation = 0.3;
  spec.effect_sd = 0.2;
  const auto a = generate(spec, 77);
  const auto b = generate(spec, 77);
  const auto c = generate(spec, 78);
  EXPECT_EQ(a.y0(), b.y0());
  EXPECT_EQ(a.y1(), b.y1());
  EXPECT_EQ(a.covariates(), b.covariates());
  EXPECT_NE(a.y1(), c.y1());
}

TEST(Generate, NoPrePeriodTreatsG1AtBaseline) {
  auto spec = noiseless(DesignKind::NoPrePeriod);
  spec.tau(1, 0) = 1.25;
  spec.tau(1, 1) = 2.0;
  const auto d = generate(spec, 1);
  EXPECT_EQ(d.y0()[0], 3.0 + 1.25);
  EXPECT_DOUBLE_EQ(gdid_simple(d, DesignKind::NoPrePeriod).value, 0.75);
}

TEST(Generate, TripleWorldNoiseless) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 10;
  spec.sigma = 0.0;
  spec.gamma = 0.4;
  spec.tau(1, 1) = 1.5;
  spec.triple = TripleArms{0.3, 0.9};
  const auto d = generate(spec, 2);
  EXPECT_EQ((d.a1().head(10).array() == 1).count(), 3);
  EXPECT_DOUBLE_EQ(triple_differences(d).value, 1.5);
  // G=0 must be unaffected.
  spec.tau(0, 1) = 0.1;
  EXPECT_THROW(generate(spec, 2), Error);
}

TEST(TrueEstimand, ByDesign) {
  DgpSpec spec;
  spec.tau(1, 1) = 2.0;
  spec.tau(0, 1) = 0.5;
  spec.tau(1, 0) = 1.25;
  spec.gamma = 0.3;
  spec.design = DesignKind::Canonical;
  EXPECT_EQ(true_estimand(spec).true_estimand, 2.0);
  EXPECT_EQ(true_estimand(spec).estimand_kind, EstimandKind::ATT_Period1);
  spec.design = DesignKind::PrePost;
  EXPECT_EQ(true_estimand(spec).true_estimand, 1.5);
  spec.design = DesignKind::NoPrePeriod;
  EXPECT_EQ(true_estimand(spec).true_estimand, 0.75);
  EXPECT_EQ(true_estimand(spec).expected_gdid_bias, 0.3);
  spec.z = CovariateMechanism{0.5, 2.0};
  EXPECT_EQ(true_estimand(spec).expected_gdid_bias, 1.3);
}

TEST(MonteCarlo, NoiselessIsExact) {
  auto spec = noiseless(DesignKind::PrePost);
  spec.tau(1, 1) = 2.0;
  spec.tau(0, 1) = 0.5;
  const auto mc = monte_carlo(spec, simple_for(DesignKind::PrePost), 20, std::nullopt, 5, 2);
  EXPECT_EQ(mc.sd, 0.0);
  EXPECT_EQ(mc.mean_bias, 0.0);
  EXPECT_EQ(mc.truth, 1.5);
  EXPECT_FALSE(mc.coverage.has_value());
}

TEST(MonteCarlo, BiasMatchesViolation) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 500;
  spec.gamma = 0.5;
  spec.tau(1, 1) = 1.0;
  const auto mc = monte_carlo(spec, simple_for(DesignKind::PrePost), 200, std::nullopt, 8);
  EXPECT_LT(std::abs(mc.mean_bias - 0.5), 3.0 * mc.mc_se);
  // Oracle: Var(delta) = 2, so the contrast has sd sqrt(2/500 + 2/500).
  EXPECT_NEAR(mc.sd, std::sqrt(4.0 / 500.0), 0.02);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResult) {
  DgpSpec spec;
  spec.n1 = spec.n0 = 100;
  BootstrapConfig ci;
  ci.replicates = 49;
  const auto a = monte_carlo(spec, simple_for(DesignKind::PrePost), 16, ci, 3, 1);
  const auto b = monte_carlo(spec, simple_for(DesignKind::PrePost), 16, ci, 3, 4);
  EXPECT_EQ(a.mean_estimate, b.mean_estimate);
  EXPECT_EQ(a.sd, b.sd);
  EXPECT_EQ(a.coverage, b.coverage);
}

TEST(MonteCarlo, NeedsTwoReplicates) {
  try {
    monte_carlo(DgpSpec{}, simple_for(DesignKind::PrePost), 1, std::nullopt, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(SpecText, ParseAndFormatRoundTrip) {
  std::istringstream in(
      "# effect modification world\n"
      "design = prepost\n"
      "n1 = 2000\n"
      "n0=1500\n"
      "tau11 = 2   # treated\n"
      "tau01 = 0.5\n"
      "gamma = 0.125\n"
      "z_shift = 0.5\n"
      "z_trend_loading = -1\n"
      "n_pre_periods = 3\n");
  const auto spec = parse_spec(in);
  EXPECT_EQ(spec.n1, 2000);
  EXPECT_EQ(spec.n0, 1500);
  EXPECT_EQ(spec.tau(1, 1), 2.0);
  EXPECT_EQ(spec.design, DesignKind::PrePost);
  ASSERT_TRUE(spec.z.has_value());
  EXPECT_EQ(spec.z->trend_loading, -1.0);

  std::istringstream again(format_spec(spec));
  const auto back = parse_spec(again);
  EXPECT_EQ(format_spec(back), format_spec(spec));
  EXPECT_EQ(back.tau, spec.tau);
  EXPECT_EQ(back.gamma, 0.125);

  DgpSpec triple;
  triple.triple = TripleArms{0.25, 0.5};
  std::istringstream t(format_spec(triple));
  const auto tb = parse_spec(t);
  ASSERT_TRUE(tb.triple.has_value());
  EXPECT_EQ(tb.triple->treated_share, 0.25);
}

ErrorCode spec_error_code(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_spec(in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

TEST(SpecText, Rejections) {
  EXPECT_EQ(spec_error_code("colour = red\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("n1 = 10\nn1 = 20\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("sigma = -1\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("tau11 = 2x\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("n1 = 2.5\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("design = sideways\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("just text\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("triple_arm_trend = 1\n"), ErrorCode::InvalidSpec);
  EXPECT_EQ(spec_error_code("design = triple\ntau01 = 1\n"), ErrorCode::InvalidSpec);
}

}  // namespace
}  // namespace gdid
