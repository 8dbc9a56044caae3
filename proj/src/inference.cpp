#include "gdid/inference.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "gdid/error.hpp"
#include "gdid/parallel.hpp"

namespace gdid {

namespace {

using Strata = std::vector<std::vector<Index>>;

Strata make_strata(const PanelDataset& data, bool stratified) {
  if (!stratified || data.group_coding() == GroupCoding::Numeric) {
    std::vector<Index> all(static_cast<std::size_t>(data.size()));
    for (Index i = 0; i < data.size(); ++i) all[i] = i;
    return {std::move(all)};
  }
  std::map<std::pair<double, int>, std::vector<Index>> cells;
  for (Index i = 0; i < data.size(); ++i) {
    cells[{data.group()[i], data.a1()[i]}].push_back(i);
  }
  Strata out;
  for (auto& [key, rows] : cells) out.push_back(std::move(rows));
  return out;
}

std::vector<Index> draw(const Strata& strata, Index n, std::uint64_t stream) {
  std::mt19937_64 rng(stream);
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (const auto& stratum : strata) {
    std::uniform_int_distribution<std::size_t> pick(0, stratum.size() - 1);
    for (std::size_t k = 0; k < stratum.size(); ++k) rows.push_back(stratum[pick(rng)]);
  }
  return rows;
}

}  // namespace

double analytic_se_simple(const PanelDataset& data) {
  const auto summary = group_summary(data);
  if (!summary[0].var_delta || !summary[1].var_delta) {
    throw Error(ErrorCode::DegenerateGroup, "analytic SE needs at least two units per group");
  }
  return std::sqrt(*summary[1].var_delta / static_cast<double>(summary[1].n) +
                   *summary[0].var_delta / static_cast<double>(summary[0].n));
}

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile p outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<Index> bootstrap_rows(const PanelDataset& data, bool stratified,
                                  std::uint64_t stream) {
  return draw(make_strata(data, stratified), data.size(), stream);
}

InferenceResult bootstrap(const PanelDataset& data, const Statistic& statistic,
                          const BootstrapConfig& cfg) {
  if (cfg.replicates < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replicate");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0, 1)");
  }
  InferenceResult result;
  result.point = statistic(data);
  result.replicates = cfg.replicates;

  const Strata strata = make_strata(data, cfg.stratified);
  std::vector<double> values(static_cast<std::size_t>(cfg.replicates));
  std::vector<char> ok(values.size(), 0);
  parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t r) {
    const auto rows = draw(strata, data.size(), stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    try {
      const double v = statistic(data.resample(rows));
      if (std::isfinite(v)) {
        values[r] = v;
        ok[r] = 1;
      }
    } catch (const Error&) {
      // counted below
    }
  });

  std::vector<double> good;
  good.reserve(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (ok[r]) good.push_back(values[r]);
  }
  result.n_failed_replicates = static_cast<int>(values.size() - good.size());
  if (result.n_failed_replicates > cfg.max_failed_fraction * cfg.replicates || good.empty()) {
    throw Error(ErrorCode::TooManyFailedReplicates,
                std::to_string(result.n_failed_replicates) + " of " +
                    std::to_string(cfg.replicates) + " bootstrap replicates failed");
  }

  // Shifted sums: identical replicates give exactly zero spread.
  const double shift = good.front();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : good) {
    sum += v - shift;
    sum_sq += (v - shift) * (v - shift);
  }
  const auto m = static_cast<double>(good.size());
  result.se = good.size() > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0))) : 0.0;

  std::sort(good.begin(), good.end());
  const double alpha = 1.0 - cfg.level;
  result.ci_percentile = {quantile_linear(good, alpha / 2.0), quantile_linear(good, 1.0 - alpha / 2.0)};
  const double z = normal_quantile(1.0 - alpha / 2.0);
  result.ci_normal = {result.point - z * result.se, result.point + z * result.se};
  return result;
}

}  // namespace gdid
