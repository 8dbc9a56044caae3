#ifndef GDID_DIAGNOSTICS_HPP_
#define GDID_DIAGNOSTICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "gdid/estimators.hpp"
#include "gdid/inference.hpp"
#include "gdid/panel.hpp"

namespace gdid {

struct PeriodGap {
  int from = 0;  // time index, t = -k ... 0
  int to = 0;
  double gap = 0.0;  // mean change G=1 minus mean change G=0
};

/// Partial assessment of group parallel trends from pre-baseline outcomes.
/// When assessable is false every numeric field is empty.
struct PreTrendResult {
  bool assessable = false;
  std::vector<PeriodGap> per_period_gap;
  std::optional<double> pooled_gap;
  std::optional<double> pooled_se;
  std::optional<Interval> ci;
  std::string verdict_note;
};

/// Between-group gaps in adjacent-period mean changes over the untreated time
/// points t = -k, ..., -1, 0 (pre-period columns oldest first, then y0).
/// Throws InsufficientPrePeriods with fewer than two time points.
std::vector<PeriodGap> pretrend_gaps(const PanelDataset& data);

/// The no-pre-period design yields assessable = false: its G=1 units are never
/// observed untreated. Otherwise gaps are reported with a bootstrap CI on
/// their average. No outcome of this check blocks estimation.
PreTrendResult pretrends(const PanelDataset& data, DesignKind design, const BootstrapConfig& cfg);

}  // namespace gdid

#endif  // GDID_DIAGNOSTICS_HPP_
