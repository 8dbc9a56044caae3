#include "gdid/estimators.hpp"

#include <cmath>

#include "gdid/error.hpp"

namespace gdid {

std::string_view to_string(EstimandKind kind) {
  switch (kind) {
    case EstimandKind::ATT_Period1: return "ATT_Period1";
    case EstimandKind::EffectModification: return "EffectModification";
    case EstimandKind::ATTChangeOverTime: return "ATTChangeOverTime";
    case EstimandKind::TripleDiffATT: return "TripleDiffATT";
    case EstimandKind::BoundedATT: return "BoundedATT";
  }
  return "EffectModification";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Simple: return "simple";
    case Method::Ipw: return "ipw";
    case Method::Continuous: return "continuous";
    case Method::Triple: return "triple";
  }
  return "simple";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "simple") return Method::Simple;
  if (text == "ipw") return Method::Ipw;
  if (text == "continuous") return Method::Continuous;
  if (text == "triple") return Method::Triple;
  return std::nullopt;
}

EstimandKind label_estimand(DesignKind design, Method method) {
  if (method == Method::Triple) return EstimandKind::TripleDiffATT;
  switch (design) {
    case DesignKind::Canonical: return EstimandKind::ATT_Period1;
    case DesignKind::PrePost: return EstimandKind::EffectModification;
    case DesignKind::NoPrePeriod: return EstimandKind::ATTChangeOverTime;
    case DesignKind::Unclassified: break;
  }
  throw Error(ErrorCode::UnclassifiedDesign, "no estimand for an unclassified design");
}

namespace {

void require_classified(DesignKind design) {
  if (design == DesignKind::Unclassified) {
    throw Error(ErrorCode::UnclassifiedDesign, "design is unclassified");
  }
}

void require_binary(const PanelDataset& data) {
  if (!data.has_binary_group()) {
    throw Error(ErrorCode::InvalidArgument, "this estimator needs a 0/1 group");
  }
}

std::vector<GroupCount> binary_counts(Index n0, Index n1) {
  return {{"G=0", n0}, {"G=1", n1}};
}

std::pair<Index, Index> require_both_groups(const PanelDataset& data) {
  const Index n1 = data.count_group(1.0);
  const Index n0 = data.size() - n1;
  if (n1 == 0 || n0 == 0) {
    throw Error(ErrorCode::DegenerateGroup, "both groups must be non-empty");
  }
  return {n0, n1};
}

}  // namespace

Estimate gdid_simple(const PanelDataset& data, DesignKind design) {
  require_classified(design);
  require_binary(data);
  const auto [n0, n1] = require_both_groups(data);
  const Eigen::ArrayXd g = data.group().array();
  const Eigen::ArrayXd d = data.delta().array();
  const double mean1 = (g * d).sum() / static_cast<double>(n1);
  const double mean0 = ((1.0 - g) * d).sum() / static_cast<double>(n0);

  Estimate e;
  e.value = mean1 - mean0;
  e.method = Method::Simple;
  e.design = design;
  e.estimand = label_estimand(design, Method::Simple);
  e.n_by_group = binary_counts(n0, n1);
  return e;
}

Estimate gdid_ipw(const PanelDataset& data, DesignKind design, const IpwOptions& options) {
  require_classified(design);
  if (design == DesignKind::NoPrePeriod) {
    throw Error(ErrorCode::UnsupportedDesign,
                "the weighted estimator is defined for canonical and pre-post designs only");
  }
  if (!(options.trim >= 0.0 && options.trim < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "trim must lie in [0, 0.5)");
  }
  require_binary(data);
  require_both_groups(data);

  const auto cols = data.covariate_columns(options.covariates);
  const Eigen::MatrixXd X =
      with_intercept(data.covariates()(Eigen::all, cols));
  const LogisticFit fit = fit_logistic(X, data.group(), options.logistic);
  if (!fit.converged) {
    throw Error(ErrorCode::NoConvergence,
                "propensity fit did not converge in " + std::to_string(fit.iterations) +
                    " iterations");
  }
  const Eigen::VectorXd e = predict_prob(fit, X);

  const double lo = options.trim;
  const double hi = 1.0 - options.trim;
  const Eigen::ArrayXd keep = ((e.array() >= lo) && (e.array() <= hi)).cast<double>();
  const Eigen::ArrayXd g = data.group().array();
  const double kept = keep.sum();
  const double kept1 = (keep * g).sum();
  if (kept1 == 0.0 || kept1 == kept) {
    throw Error(ErrorCode::OverlapViolation,
                "propensity trimming at " + std::to_string(options.trim) + " empties a group");
  }
  const double p = kept1 / kept;
  const Eigen::ArrayXd weights = keep * (g - e.array()) / (1.0 - e.array());
  const double value = (data.delta().array() * weights).sum() / (p * kept);

  Estimate out;
  out.value = value;
  out.method = Method::Ipw;
  out.design = design;
  out.estimand = label_estimand(design, Method::Ipw);
  out.n_by_group = binary_counts(static_cast<Index>(kept - kept1), static_cast<Index>(kept1));
  out.n_trimmed = data.size() - static_cast<Index>(kept);
  return out;
}

Estimate gdid_continuous(const PanelDataset& data, DesignKind design, double g, double g_prime,
                         const ContinuousOptions& options) {
  require_classified(design);
  if (!std::isfinite(g) || !std::isfinite(g_prime) || g == g_prime) {
    throw Error(ErrorCode::InvalidArgument, "contrast levels must be finite and distinct");
  }
  if (options.degree < 1) {
    throw Error(ErrorCode::InvalidArgument, "basis degree must be at least 1");
  }
  const double lo = data.group().minCoeff();
  const double hi = data.group().maxCoeff();
  auto inside = [&](double v) { return lo <= v && v <= hi; };
  if (!options.allow_extrapolation && (!inside(g) || !inside(g_prime))) {
    throw Error(ErrorCode::ExtrapolationWarning,
                "contrast levels must lie inside the observed group support [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const Eigen::MatrixXd basis = polynomial_basis(data.group(), options.degree);
  const OlsFit fit = fit_ols(basis, data.delta());
  Eigen::Vector2d at(g, g_prime);
  const Eigen::VectorXd fitted = polynomial_basis(at, options.degree) * fit.coefficients;

  Estimate out;
  out.value = fitted[0] - fitted[1];
  out.method = Method::Continuous;
  out.design = design;
  out.estimand = label_estimand(design, Method::Continuous);
  if (data.has_binary_group()) {
    const Index n1 = data.count_group(1.0);
    out.n_by_group = binary_counts(data.size() - n1, n1);
  } else {
    out.n_by_group = {{"all", data.size()}};
  }
  out.contrast = std::make_pair(g, g_prime);
  return out;
}

Interval apply_bounds(const Estimate& estimate, const BoundsSpec& bounds) {
  if (!(bounds.tau_l <= bounds.tau_u)) {
    throw Error(ErrorCode::InvalidBounds, "tau_l must not exceed tau_u");
  }
  if (estimate.estimand != EstimandKind::EffectModification) {
    throw Error(ErrorCode::BoundsNotApplicable,
                "bounds apply to effect-modification estimates only");
  }
  return {estimate.value + bounds.tau_l, estimate.value + bounds.tau_u};
}

Estimate triple_differences(const PanelDataset& data) {
  require_binary(data);
  if ((data.a0().array() != 0).any()) {
    throw Error(ErrorCode::UnsupportedDesign,
                "triple differences needs every unit untreated in the first period");
  }
  const Eigen::ArrayXd g = data.group().array();
  const Eigen::ArrayXd a = data.a1().cast<double>().array();
  const Eigen::ArrayXd d = data.delta().array();
  double mean[2][2];
  Index count[2][2];
  for (int gi = 0; gi < 2; ++gi) {
    for (int ai = 0; ai < 2; ++ai) {
      const Eigen::ArrayXd mask = ((g == gi) && (a == ai)).cast<double>();
      count[gi][ai] = static_cast<Index>(mask.sum());
      if (count[gi][ai] == 0) {
        throw Error(ErrorCode::EmptyCell, "cell G=" + std::to_string(gi) +
                                              ", A=" + std::to_string(ai) + " is empty");
      }
      mean[gi][ai] = (mask * d).sum() / static_cast<double>(count[gi][ai]);
    }
  }
  Estimate out;
  out.value = (mean[1][1] - mean[0][1]) - (mean[1][0] - mean[0][0]);
  out.method = Method::Triple;
  out.design = detect_design(data);
  out.estimand = EstimandKind::TripleDiffATT;
  out.n_by_group = {{"G=0,A=0", count[0][0]},
                    {"G=0,A=1", count[0][1]},
                    {"G=1,A=0", count[1][0]},
                    {"G=1,A=1", count[1][1]}};
  return out;
}

}  // namespace gdid
