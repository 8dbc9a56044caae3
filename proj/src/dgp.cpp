#include "gdid/dgp.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "gdid/error.hpp"
#include "gdid/parallel.hpp"

namespace gdid {

namespace {

void spec_error(const std::string& message) { throw Error(ErrorCode::InvalidSpec, message); }

Index treated_in_arm(const DgpSpec& spec, Index n) {
  return static_cast<Index>(std::floor(spec.triple->treated_share * static_cast<double>(n)));
}

}  // namespace

void validate_spec(const DgpSpec& spec) {
  if (spec.n1 < 1 || spec.n0 < 1) spec_error("each group needs at least one unit");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) spec_error("sigma must be >= 0");
  if (spec.n_pre_periods < 0) spec_error("n_pre_periods must be >= 0");
  if (!(spec.noise_correlation >= 0.0 && spec.noise_correlation <= 1.0)) {
    spec_error("noise_correlation must lie in [0, 1]");
  }
  if (!(spec.effect_sd >= 0.0) || !std::isfinite(spec.effect_sd)) spec_error("effect_sd must be >= 0");
  const double scalars[] = {spec.alpha1, spec.alpha0, spec.delta, spec.gamma, spec.gamma_pre};
  for (double v : scalars) {
    if (!std::isfinite(v)) spec_error("spec values must be finite");
  }
  if (!spec.tau.allFinite()) spec_error("tau must be finite");
  if (spec.z && (!std::isfinite(spec.z->shift) || !std::isfinite(spec.z->trend_loading))) {
    spec_error("covariate mechanism must be finite");
  }
  if (spec.triple) {
    if (!(spec.triple->treated_share > 0.0 && spec.triple->treated_share < 1.0) ||
        !std::isfinite(spec.triple->arm_trend)) {
      spec_error("triple_treated_share must lie in (0, 1)");
    }
    for (Index n : {spec.n1, spec.n0}) {
      const Index treated = treated_in_arm(spec, n);
      if (treated < 1 || treated >= n) spec_error("every (G, A1) cell must be non-empty");
    }
    if (spec.tau(0, 1) != 0.0) spec_error("triple-differences worlds need tau01 = 0");
  } else if (spec.design == DesignKind::Unclassified) {
    spec_error("design must be canonical, prepost, nopre or triple");
  }
}

PanelDataset generate(const DgpSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int k = spec.n_pre_periods;
  const double unit_share = std::sqrt(spec.noise_correlation);
  const double period_share = std::sqrt(1.0 - spec.noise_correlation);

  std::vector<PanelUnit> units;
  units.reserve(static_cast<std::size_t>(spec.n1 + spec.n0));
  for (int g : {1, 0}) {
    const Index n = g == 1 ? spec.n1 : spec.n0;
    const double alpha = g == 1 ? spec.alpha1 : spec.alpha0;
    const Index treated_arm = spec.triple ? treated_in_arm(spec, n) : 0;
    for (Index i = 0; i < n; ++i) {
      PanelUnit u;
      u.unit_id = "u" + std::to_string(units.size() + 1);
      u.group = g;
      if (spec.triple) {
        u.a0 = 0;
        u.a1 = i < treated_arm ? 1 : 0;
      } else {
        switch (spec.design) {
          case DesignKind::Canonical: u.a0 = 0; u.a1 = g; break;
          case DesignKind::PrePost: u.a0 = 0; u.a1 = 1; break;
          default: u.a0 = g; u.a1 = g; break;
        }
      }

      double z = 0.0;
      if (spec.z) {
        z = spec.z->shift * g + normal(rng);
        u.covariates.push_back(z);
      }
      const double unit_noise = spec.noise_correlation > 0.0 ? normal(rng) : 0.0;
      const double effect_noise = spec.effect_sd > 0.0 ? spec.effect_sd * normal(rng) : 0.0;
      auto noise = [&] {
        return spec.sigma * (unit_share * unit_noise + period_share * normal(rng));
      };
      const double common =
          spec.delta + (spec.z ? spec.z->trend_loading * z : 0.0) +
          (spec.triple ? spec.triple->arm_trend * u.a1 : 0.0);
      const double post_trend = common + spec.gamma * g;
      const double pre_trend = common + spec.gamma_pre * g;
      // Unit effect of treatment at time t (period 0 effect also used before baseline).
      auto effect = [&](int t) { return spec.tau(g, t) + effect_noise; };

      for (int t = -k; t < 0; ++t) {
        double y = alpha + t * pre_trend + noise();
        if (u.a0 == 1) y += effect(0);
        u.pre_outcomes.push_back(y);
      }
      u.y0 = alpha + noise();
      if (u.a0 == 1) u.y0 += effect(0);
      u.y1 = alpha + post_trend + noise();
      if (u.a1 == 1) u.y1 += effect(1);
      units.push_back(std::move(u));
    }
  }
  std::vector<std::string> covariate_names;
  if (spec.z) covariate_names.push_back("z");
  std::vector<std::string> pre_names;
  for (int t = -k; t < 0; ++t) pre_names.push_back("y_m" + std::to_string(-t));
  return PanelDataset(std::move(units), std::move(covariate_names), std::move(pre_names),
                      GroupCoding::Binary, {"0", "1"});
}

TruthReport true_estimand(const DgpSpec& spec) {
  TruthReport truth;
  truth.expected_gdid_bias = spec.gamma + (spec.z ? spec.z->trend_loading * spec.z->shift : 0.0);
  if (spec.triple) {
    truth.true_estimand = spec.tau(1, 1);
    truth.estimand_kind = EstimandKind::TripleDiffATT;
    return truth;
  }
  switch (spec.design) {
    case DesignKind::Canonical:
      truth.true_estimand = spec.tau(1, 1);
      break;
    case DesignKind::PrePost:
      truth.true_estimand = spec.tau(1, 1) - spec.tau(0, 1);
      break;
    case DesignKind::NoPrePeriod:
      truth.true_estimand = spec.tau(1, 1) - spec.tau(1, 0);
      break;
    case DesignKind::Unclassified:
      throw Error(ErrorCode::UnclassifiedDesign, "no true estimand for an unclassified design");
  }
  truth.estimand_kind = label_estimand(spec.design, Method::Simple);
  return truth;
}

MonteCarloSummary monte_carlo(const DgpSpec& spec, const EstimatorFn& estimator, int reps,
                              const std::optional<BootstrapConfig>& ci, std::uint64_t seed,
                              unsigned threads) {
  if (reps < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least two replicates");
  validate_spec(spec);
  MonteCarloSummary summary;
  summary.reps = reps;
  summary.truth = true_estimand(spec).true_estimand;

  std::vector<double> estimates(static_cast<std::size_t>(reps));
  std::vector<char> ok(estimates.size(), 0);
  std::vector<char> covered(estimates.size(), 0);
  parallel_for(reps, threads, [&](std::int64_t r) {
    const auto stream = stream_seed(seed, static_cast<std::uint64_t>(r));
    const PanelDataset data = generate(spec, stream);
    try {
      estimates[r] = estimator(data).value;
      if (ci) {
        BootstrapConfig cfg = *ci;
        cfg.seed = stream_seed(ci->seed, static_cast<std::uint64_t>(r));
        cfg.threads = 1;
        const auto inf = bootstrap(
            data, [&](const PanelDataset& d) { return estimator(d).value; }, cfg);
        covered[r] = inf.ci_percentile.contains(summary.truth) ? 1 : 0;
      }
      ok[r] = std::isfinite(estimates[r]) ? 1 : 0;
    } catch (const Error&) {
      // counted below
    }
  });

  std::vector<double> good;
  int n_covered = 0;
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    if (!ok[r]) continue;
    good.push_back(estimates[r]);
    n_covered += covered[r];
  }
  summary.n_failed = reps - static_cast<int>(good.size());
  if (summary.n_failed > 0.05 * reps || good.size() < 2) {
    throw Error(ErrorCode::TooManyFailedReplicates,
                std::to_string(summary.n_failed) + " of " + std::to_string(reps) +
                    " Monte Carlo replicates failed");
  }
  const auto m = static_cast<double>(good.size());
  const double shift = good.front();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : good) {
    sum += v - shift;
    sum_sq += (v - shift) * (v - shift);
  }
  summary.mean_estimate = shift + sum / m;
  summary.mean_bias = summary.mean_estimate - summary.truth;
  summary.sd = std::sqrt(std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0)));
  summary.mc_se = summary.sd / std::sqrt(m);
  if (ci) summary.coverage = static_cast<double>(n_covered) / m;
  return summary;
}

namespace {

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    spec_error("key '" + key + "': not a number: '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    spec_error("key '" + key + "': not an integer: '" + text + "'");
  }
  return v;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

DgpSpec parse_spec(std::istream& in) {
  DgpSpec spec;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  bool triple = false;
  CovariateMechanism z;
  bool has_z = false;
  TripleArms arms;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) spec_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (!seen.insert(key).second) spec_error("key '" + key + "' given twice");

    if (key == "design") {
      if (value == "triple") {
        triple = true;
      } else {
        auto d = parse_design(value);
        if (!d || *d == DesignKind::Unclassified) spec_error("unknown design '" + value + "'");
        spec.design = *d;
      }
    } else if (key == "n1") {
      spec.n1 = parse_integer(key, value);
    } else if (key == "n0") {
      spec.n0 = parse_integer(key, value);
    } else if (key == "n_pre_periods") {
      const auto v = parse_integer(key, value);
      if (v < 0 || v > 1000) spec_error("n_pre_periods out of range");
      spec.n_pre_periods = static_cast<int>(v);
    } else if (key == "alpha1") {
      spec.alpha1 = parse_real(key, value);
    } else if (key == "alpha0") {
      spec.alpha0 = parse_real(key, value);
    } else if (key == "delta") {
      spec.delta = parse_real(key, value);
    } else if (key == "gamma") {
      spec.gamma = parse_real(key, value);
    } else if (key == "tau00") {
      spec.tau(0, 0) = parse_real(key, value);
    } else if (key == "tau01") {
      spec.tau(0, 1) = parse_real(key, value);
    } else if (key == "tau10") {
      spec.tau(1, 0) = parse_real(key, value);
    } else if (key == "tau11") {
      spec.tau(1, 1) = parse_real(key, value);
    } else if (key == "sigma") {
      spec.sigma = parse_real(key, value);
    } else if (key == "gamma_pre") {
      spec.gamma_pre = parse_real(key, value);
    } else if (key == "z_shift") {
      z.shift = parse_real(key, value);
      has_z = true;
    } else if (key == "z_trend_loading") {
      z.trend_loading = parse_real(key, value);
      has_z = true;
    } else if (key == "triple_treated_share") {
      arms.treated_share = parse_real(key, value);
    } else if (key == "triple_arm_trend") {
      arms.arm_trend = parse_real(key, value);
    } else if (key == "noise_correlation") {
      spec.noise_correlation = parse_real(key, value);
    } else if (key == "effect_sd") {
      spec.effect_sd = parse_real(key, value);
    } else {
      spec_error("unknown key '" + key + "'");
    }
  }
  if (!triple && (seen.count("triple_treated_share") || seen.count("triple_arm_trend"))) {
    spec_error("triple_* keys need design = triple");
  }
  if (has_z) spec.z = z;
  if (triple) {
    spec.triple = arms;
    spec.design = DesignKind::Unclassified;
  }
  validate_spec(spec);
  return spec;
}

std::string format_spec(const DgpSpec& spec) {
  std::ostringstream out;
  std::string design = spec.triple ? "triple" : std::string(to_string(spec.design));
  if (!spec.triple) {
    design = spec.design == DesignKind::Canonical ? "canonical"
             : spec.design == DesignKind::PrePost ? "prepost"
                                                  : "nopre";
  }
  out << "design = " << design << '\n'
      << "n1 = " << spec.n1 << '\n'
      << "n0 = " << spec.n0 << '\n'
      << "alpha1 = " << format_real(spec.alpha1) << '\n'
      << "alpha0 = " << format_real(spec.alpha0) << '\n'
      << "delta = " << format_real(spec.delta) << '\n'
      << "gamma = " << format_real(spec.gamma) << '\n'
      << "tau00 = " << format_real(spec.tau(0, 0)) << '\n'
      << "tau01 = " << format_real(spec.tau(0, 1)) << '\n'
      << "tau10 = " << format_real(spec.tau(1, 0)) << '\n'
      << "tau11 = " << format_real(spec.tau(1, 1)) << '\n'
      << "sigma = " << format_real(spec.sigma) << '\n'
      << "n_pre_periods = " << spec.n_pre_periods << '\n'
      << "gamma_pre = " << format_real(spec.gamma_pre) << '\n'
      << "noise_correlation = " << format_real(spec.noise_correlation) << '\n'
      << "effect_sd = " << format_real(spec.effect_sd) << '\n';
  if (spec.z) {
    out << "z_shift = " << format_real(spec.z->shift) << '\n'
        << "z_trend_loading = " << format_real(spec.z->trend_loading) << '\n';
  }
  if (spec.triple) {
    out << "triple_treated_share = " << format_real(spec.triple->treated_share) << '\n'
        << "triple_arm_trend = " << format_real(spec.triple->arm_trend) << '\n';
  }
  return out.str();
}

}  // namespace gdid
