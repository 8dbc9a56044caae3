#ifndef GDID_DGP_HPP_
#define GDID_DGP_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "gdid/estimators.hpp"
#include "gdid/inference.hpp"
#include "gdid/panel.hpp"

namespace gdid {

/// Covariate Z with Z | G=g ~ N(shift * g, 1); the untreated trend gains
/// trend_loading * Z. The true propensity P(G=1 | Z) is then logistic-linear.
struct CovariateMechanism {
  double shift = 0.0;
  double trend_loading = 0.0;
};

/// Triple-differences layout: within each group the first
/// floor(treated_share * n_g) units have a1 = 1. Treated-arm units get an extra
/// untreated trend arm_trend, common to both groups, so the difference in
/// trends between groups is equal across arms. G=0 is the unaffected subgroup.
struct TripleArms {
  double treated_share = 0.5;
  double arm_trend = 0.0;
};

/// Closed-form potential-outcome world. Untreated outcomes for unit i in
/// group g at time t are
///
///   Y_t(0) = alpha_g + t * (delta + gamma * 1[g=1] + lambda * Z_i) + noise     (t = 0, 1)
///   Y_t(0) = alpha_g + t * (delta + gamma_pre * 1[g=1] + lambda * Z_i) + noise (t < 0)
///
/// and Y_t(1) = Y_t(0) + tau(g, t) (+ optional unit-level effect noise).
/// Observed outcomes take the potential outcome of the design's treatment.
struct DgpSpec {
  Index n1 = 1000;
  Index n0 = 1000;
  double alpha1 = 0.0;
  double alpha0 = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  Eigen::Matrix2d tau = Eigen::Matrix2d::Zero();  // tau(g, t)
  double sigma = 1.0;
  int n_pre_periods = 0;
  double gamma_pre = 0.0;
  DesignKind design = DesignKind::PrePost;
  std::optional<CovariateMechanism> z;
  std::optional<TripleArms> triple;  // when set, design is ignored
  double noise_correlation = 0.0;    // share of noise variance that is a unit effect
  double effect_sd = 0.0;            // heterogeneous treatment effects (mean zero)
};

void validate_spec(const DgpSpec& spec);

/// Deterministic in (spec, seed). G=1 units come first, ids "u1", "u2", ...;
/// covariate column "z" and pre-period columns "y_m<k>" (oldest first).
PanelDataset generate(const DgpSpec& spec, std::uint64_t seed);

struct TruthReport {
  double true_estimand = 0.0;
  double expected_gdid_bias = 0.0;  // plim of the simple contrast minus the truth
  EstimandKind estimand_kind = EstimandKind::EffectModification;
};

/// Canonical: tau11. PrePost: tau11 - tau01. NoPrePeriod: tau11 - tau10.
/// Triple: tau11. The simple contrast is off by gamma, plus
/// trend_loading * shift when a covariate shifts the trend.
TruthReport true_estimand(const DgpSpec& spec);

struct MonteCarloSummary {
  int reps = 0;
  int n_failed = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double mean_bias = 0.0;
  double sd = 0.0;
  double mc_se = 0.0;
  std::optional<double> coverage;  // share of percentile CIs containing truth
};

using EstimatorFn = std::function<Estimate(const PanelDataset&)>;

/// Replicate r uses generate(spec, stream_seed(seed, r)); when `ci` is set each
/// replicate also runs a bootstrap (single-threaded, seeded from the replicate).
/// Estimator errors are counted; more than 5% failures raise
/// TooManyFailedReplicates.
MonteCarloSummary monte_carlo(const DgpSpec& spec, const EstimatorFn& estimator, int reps,
                              const std::optional<BootstrapConfig>& ci, std::uint64_t seed,
                              unsigned threads = 0);

/// Flat "key = value" text, '#' starts a comment. Unknown or repeated keys,
/// malformed numbers, and invalid specs raise InvalidSpec. Keys:
///   design (canonical|prepost|nopre|triple), n1, n0, alpha1, alpha0, delta,
///   gamma, tau00, tau01, tau10, tau11, sigma, n_pre_periods, gamma_pre,
///   z_shift, z_trend_loading, triple_treated_share, triple_arm_trend,
///   noise_correlation, effect_sd
DgpSpec parse_spec(std::istream& in);
std::string format_spec(const DgpSpec& spec);

}  // namespace gdid

#endif  // GDID_DGP_HPP_
