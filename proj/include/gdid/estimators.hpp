#ifndef GDID_ESTIMATORS_HPP_
#define GDID_ESTIMATORS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gdid/numerics.hpp"
#include "gdid/panel.hpp"

namespace gdid {

/// What the group difference-in-differences contrast means causally. The same
/// arithmetic identifies a different quantity in each design:
///
///   ATT_Period1         Canonical:   E[Y1(1) - Y1(0) | G=1]
///   EffectModification  PrePost:     E[Y1(1) - Y1(0) | G=1] - E[Y1(1) - Y1(0) | G=0]
///   ATTChangeOverTime   NoPrePeriod: E[Y1(1) - Y1(0) | G=1] - E[Y0(1) - Y0(0) | G=1]
///   TripleDiffATT       E[Y1(1) - Y1(0) | G=1, A1=1] with an unaffected G=0 subgroup
///   BoundedATT          interval for E[Y1(1) - Y1(0) | G=1] from assumed G=0 bounds
enum class EstimandKind {
  ATT_Period1,
  EffectModification,
  ATTChangeOverTime,
  TripleDiffATT,
  BoundedATT,
};

enum class Method { Simple, Ipw, Continuous, Triple };

std::string_view to_string(EstimandKind kind);
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

struct GroupCount {
  std::string label;
  Index n = 0;
};

struct Estimate {
  double value = 0.0;
  EstimandKind estimand = EstimandKind::EffectModification;
  Method method = Method::Simple;
  DesignKind design = DesignKind::PrePost;
  std::vector<GroupCount> n_by_group;
  std::optional<std::pair<double, double>> contrast;  // (g, g') for dose contrasts
  Index n_trimmed = 0;                                // IPW overlap trimming
};

/// Analyst-asserted bounds on E[Y1(1) - Y1(0) | G=0].
struct BoundsSpec {
  double tau_l = 0.0;
  double tau_u = 0.0;
};

struct IpwOptions {
  std::vector<std::string> covariates;  // empty: intercept-only propensity
  double trim = 0.01;
  LogisticOptions logistic;
};

struct ContinuousOptions {
  int degree = 1;
  bool allow_extrapolation = false;
};

EstimandKind label_estimand(DesignKind design, Method method);

/// mean(y1 - y0 | G=1) - mean(y1 - y0 | G=0).
Estimate gdid_simple(const PanelDataset& data, DesignKind design);

/// Inverse-probability-weighted contrast
///   mean_i[ (delta_i / p) * (G_i - e(Z_i)) / (1 - e(Z_i)) ]
/// with p the G=1 share and e(Z) a logistic fit of G on Z. Valid under group
/// parallel trends conditional on Z. Stated for Y0 rather than Y0(0); the two
/// coincide because a0 = 0 in both supported designs.
///
/// Units whose fitted e(Z) lies outside [trim, 1 - trim] are dropped; p is
/// then the G=1 share among retained units.
Estimate gdid_ipw(const PanelDataset& data, DesignKind design, const IpwOptions& options = {});

/// Regression contrast E[delta | G=g] - E[delta | G=g'] from a least-squares
/// polynomial fit of delta on G.
Estimate gdid_continuous(const PanelDataset& data, DesignKind design, double g, double g_prime,
                         const ContinuousOptions& options = {});

/// [value + tau_l, value + tau_u]: bounds on the G=1 ATT given bounds on the
/// G=0 ATT. tau_l = tau_u = 0 is the zero-effect-subgroup point identification.
Interval apply_bounds(const Estimate& estimate, const BoundsSpec& bounds);

/// (delta|G1,A1 - delta|G0,A1) - (delta|G1,A0 - delta|G0,A0), A = a1.
Estimate triple_differences(const PanelDataset& data);

}  // namespace gdid

#endif  // GDID_ESTIMATORS_HPP_
