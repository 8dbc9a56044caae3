#include "gdid/diagnostics.hpp"

#include "gdid/error.hpp"

namespace gdid {

namespace {

constexpr const char* kNotAssessable =
    "Group parallel trends cannot be assessed with pre-trends in the no-pre-period design: "
    "units in G=1 are treated in every observed period, so their untreated outcomes are "
    "never observed.";

constexpr const char* kPartial =
    "Partial assessment only: similar pre-baseline trends lend some credibility to group "
    "parallel trends but cannot confirm it for the post-baseline period.";

double pooled(const std::vector<PeriodGap>& gaps) {
  double sum = 0.0;
  for (const auto& g : gaps) sum += g.gap;
  return sum / static_cast<double>(gaps.size());
}

}  // namespace

std::vector<PeriodGap> pretrend_gaps(const PanelDataset& data) {
  const Index p = data.pre_period_count();
  if (p < 1) {
    throw Error(ErrorCode::InsufficientPrePeriods,
                "pre-trends need at least two untreated time points (one pre-period column plus t=0)");
  }
  if (!data.has_binary_group()) {
    throw Error(ErrorCode::InvalidArgument, "pre-trends need a 0/1 group");
  }
  const Eigen::ArrayXd g = data.group().array();
  const double n1 = g.sum();
  const double n0 = static_cast<double>(data.size()) - n1;
  if (n1 == 0.0 || n0 == 0.0) throw Error(ErrorCode::DegenerateGroup, "both groups must be non-empty");

  auto column = [&](Index j) -> Eigen::ArrayXd {
    if (j < p) return data.pre_outcomes().col(j).array();
    return data.y0().array();
  };
  std::vector<PeriodGap> gaps;
  for (Index j = 0; j < p; ++j) {
    const Eigen::ArrayXd change = column(j + 1) - column(j);
    PeriodGap gap;
    gap.from = static_cast<int>(j - p);
    gap.to = gap.from + 1;
    gap.gap = (g * change).sum() / n1 - ((1.0 - g) * change).sum() / n0;
    gaps.push_back(gap);
  }
  return gaps;
}

PreTrendResult pretrends(const PanelDataset& data, DesignKind design, const BootstrapConfig& cfg) {
  if (design == DesignKind::Unclassified) {
    throw Error(ErrorCode::UnclassifiedDesign, "pre-trends need a classified design");
  }
  PreTrendResult result;
  if (design == DesignKind::NoPrePeriod) {
    result.assessable = false;
    result.verdict_note = kNotAssessable;
    return result;
  }
  result.assessable = true;
  result.per_period_gap = pretrend_gaps(data);
  const InferenceResult inf =
      bootstrap(data, [](const PanelDataset& d) { return pooled(pretrend_gaps(d)); }, cfg);
  result.pooled_gap = pooled(result.per_period_gap);
  result.pooled_se = inf.se;
  result.ci = inf.ci_percentile;
  result.verdict_note = kPartial;
  return result;
}

}  // namespace gdid
