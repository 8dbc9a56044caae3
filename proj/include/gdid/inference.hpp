#ifndef GDID_INFERENCE_HPP_
#define GDID_INFERENCE_HPP_

#include <cstdint>
#include <functional>
#include <span>

#include "gdid/estimators.hpp"
#include "gdid/panel.hpp"

namespace gdid {

struct BootstrapConfig {
  int replicates = 1999;
  std::uint64_t seed = 0;
  double level = 0.95;
  bool stratified = true;  // resample within (G, A1) cells
  unsigned threads = 0;    // 0: default_thread_count()
  double max_failed_fraction = 0.05;
};

struct InferenceResult {
  double point = 0.0;
  double se = 0.0;
  Interval ci_percentile;
  Interval ci_normal;
  int replicates = 0;
  int n_failed_replicates = 0;
};

/// Any scalar functional of a dataset; estimators are adapted with a lambda
/// returning Estimate::value.
using Statistic = std::function<double(const PanelDataset&)>;

/// sqrt(s1^2 / n1 + s0^2 / n0) for the simple contrast, s_g^2 the sample
/// variance of y1 - y0 within group g.
double analytic_se_simple(const PanelDataset& data);

/// Quantile of sorted values by linear interpolation between order
/// statistics: h = (n - 1) p, x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
double quantile_linear(std::span<const double> sorted, double p);

/// Standard normal quantile.
double normal_quantile(double p);

/// Nonparametric bootstrap. Replicate r draws its rows from an mt19937_64
/// seeded with stream_seed(cfg.seed, r) alone, so the result is identical for
/// any thread count. Replicates whose statistic throws gdid::Error or returns a
/// non-finite value are counted as failed; more than max_failed_fraction of
/// them raises TooManyFailedReplicates. The statistic on the full data is
/// evaluated first and its errors propagate.
///
/// Stratification uses the (G, A1) cells of binary-coded groups; a numeric
/// group is resampled as a single stratum.
InferenceResult bootstrap(const PanelDataset& data, const Statistic& statistic,
                          const BootstrapConfig& cfg = {});

/// Row indices of one stratified (or plain) resample; exposed for testing.
std::vector<Index> bootstrap_rows(const PanelDataset& data, bool stratified,
                                  std::uint64_t stream);

}  // namespace gdid

#endif  // GDID_INFERENCE_HPP_
