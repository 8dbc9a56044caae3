#ifndef GDID_TESTS_TEST_UTIL_HPP_
#define GDID_TESTS_TEST_UTIL_HPP_

#include <random>
#include <string>
#include <vector>

#include "gdid/panel.hpp"

namespace gdid::testing {

inline PanelUnit make_unit(std::string id, double g, int a0, int a1, double y0, double y1) {
  PanelUnit u;
  u.unit_id = std::move(id);
  u.group = g;
  u.a0 = a0;
  u.a1 = a1;
  u.y0 = y0;
  u.y1 = y1;
  return u;
}

/// G1 deltas {5, 7}, G0 deltas {1, 3}, canonical layout.
inline PanelDataset four_row_canonical() {
  return PanelDataset({make_unit("a", 1, 0, 1, 0, 5), make_unit("b", 1, 0, 1, 1, 8),
                       make_unit("c", 0, 0, 0, 2, 3), make_unit("d", 0, 0, 0, 0, 3)});
}

/// Random pre-post (default) dataset with n in [n_min, n_max], both groups of
/// size >= 2, heavy-ish tails and k covariates.
inline PanelDataset random_dataset(std::mt19937_64& rng, int n_min = 50, int n_max = 500,
                                   DesignKind design = DesignKind::PrePost, int k = 0,
                                   int pre = 0) {
  std::uniform_int_distribution<int> size(n_min, n_max);
  std::uniform_real_distribution<double> share(0.2, 0.8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::student_t_distribution<double> heavy(3.0);
  const int n = size(rng);
  const double p = share(rng);
  const double offset = 10.0 * normal(rng);
  std::vector<PanelUnit> units;
  for (int i = 0; i < n; ++i) {
    const int g = i < 2 ? 1 : (i < 4 ? 0 : (std::bernoulli_distribution(p)(rng) ? 1 : 0));
    PanelUnit u;
    u.unit_id = "r" + std::to_string(i);
    u.group = g;
    switch (design) {
      case DesignKind::Canonical: u.a0 = 0; u.a1 = g; break;
      case DesignKind::NoPrePeriod: u.a0 = g; u.a1 = g; break;
      default: u.a0 = 0; u.a1 = 1; break;
    }
    u.y0 = offset + 2.0 * g + heavy(rng);
    u.y1 = u.y0 + 1.0 + 0.7 * g + 3.0 * heavy(rng);
    for (int j = 0; j < k; ++j) u.covariates.push_back(normal(rng) + 0.3 * g);
    for (int j = 0; j < pre; ++j) u.pre_outcomes.push_back(offset + normal(rng) + g);
    units.push_back(std::move(u));
  }
  return PanelDataset(std::move(units));
}

/// Applies f to every unit and rebuilds the dataset.
template <typename F>
PanelDataset transform_units(const PanelDataset& data, F f) {
  auto units = data.units();
  for (auto& u : units) f(u);
  return PanelDataset(std::move(units), data.covariate_names(), data.pre_period_names(),
                      data.group_coding(), data.group_levels());
}

}  // namespace gdid::testing

#endif  // GDID_TESTS_TEST_UTIL_HPP_
