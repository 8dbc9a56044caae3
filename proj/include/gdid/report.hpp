#ifndef GDID_REPORT_HPP_
#define GDID_REPORT_HPP_

#include <json.hpp>

#include <string>

#include "gdid/dgp.hpp"
#include "gdid/diagnostics.hpp"
#include "gdid/estimators.hpp"
#include "gdid/inference.hpp"

namespace gdid {

inline constexpr const char* kReportSchema = "gdid-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Wording used in interpretation sentences. `verb` describes what the
/// treatment does to the outcome ("change", "increase", "reduce", ...); with a
/// reducing verb a positive contrast reads as "fewer".
struct InterpretationLabels {
  std::string treatment_name = "the treatment";
  std::string outcome_name = "the outcome";
  std::string group1_name = "G=1 units";
  std::string group0_name = "G=0 units";
  std::string unit = "units";
  std::string verb = "change";
  std::string first_period = "the first period";
  std::string second_period = "the second period";
};

/// One sentence naming the estimand the value stands for, the confidence
/// interval as "(95% CI: lo, hi)", and a caveat that group or period may only
/// be associated with the effect variation. Numbers use `precision` decimals;
/// a value that rounds to zero produces the "no estimated difference" form.
std::string render_interpretation(DesignKind design, EstimandKind estimand, double value,
                                  const Interval& ci, const InterpretationLabels& labels = {},
                                  double level = 0.95, int precision = 2);

std::string render_bounds(const Interval& bounds, const BoundsSpec& spec,
                          const InterpretationLabels& labels = {}, int precision = 2);

Json to_json(const Interval& interval);
Json to_json(const Estimate& estimate);
Json to_json(const InferenceResult& inference, double level);
Json to_json(const PreTrendResult& result, double level);
Json to_json(const TruthReport& truth);
Json to_json(const MonteCarloSummary& summary);
Json to_json(const DgpSpec& spec);

}  // namespace gdid

#endif  // GDID_REPORT_HPP_
