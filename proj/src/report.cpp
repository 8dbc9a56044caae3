#include "gdid/report.hpp"

#include <cmath>
#include <cstdio>

namespace gdid {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string level_text(double level) {
  const double pct = level * 100.0;
  if (std::abs(pct - std::round(pct)) < 1e-9) return fixed(std::round(pct), 0);
  return fixed(pct, 1);
}

std::string ci_text(const Interval& ci, double level, int precision) {
  return "(" + level_text(level) + "% CI: " + fixed(ci.lower, precision) + ", " +
         fixed(ci.upper, precision) + ")";
}

bool reducing(const std::string& verb) {
  return verb == "reduce" || verb == "decrease" || verb == "lower" || verb == "worsen";
}

bool rounds_to_zero(double v, int precision) {
  return fixed(std::abs(v), precision).find_first_not_of("0.") == std::string::npos;
}

std::string sentence_for(EstimandKind estimand, double value, const Interval& ci,
                         const InterpretationLabels& l, double level, int precision) {
  const std::string magnitude = fixed(std::abs(value), precision);
  const std::string interval = ci_text(ci, level, precision);
  const bool zero = rounds_to_zero(value, precision);
  // Positive means "the quantity the verb describes is larger".
  const bool larger = reducing(l.verb) ? value < 0 : value > 0;

  switch (estimand) {
    case EstimandKind::EffectModification:
      if (zero) {
        return "There was no estimated difference in the effect of " + l.treatment_name +
               " on " + l.outcome_name + " between " + l.group1_name + " and " +
               l.group0_name + " " + interval + ". Membership in " + l.group1_name +
               " may simply be associated with varying effects of " + l.treatment_name + ".";
      }
      return l.treatment_name + " was estimated to " + l.verb + " " + l.outcome_name + " by " +
             magnitude + " " + (larger ? "more" : "fewer") + " " + l.unit + " " + interval +
             " in " + l.group1_name + " than " + l.group0_name +
             ". No claim is made that belonging to " + l.group1_name + " alters the effect of " +
             l.treatment_name + "; membership may simply be associated with varying effects of " +
             l.treatment_name + ".";

    case EstimandKind::ATTChangeOverTime:
      if (zero) {
        return "There was no estimated difference between the effect of " + l.treatment_name +
               " on " + l.outcome_name + " in " + l.second_period + " and in " +
               l.first_period + " among " + l.group1_name + " " + interval +
               ". The period may simply be associated with time-varying effects of " +
               l.treatment_name + ".";
      }
      return l.treatment_name + " was estimated to " + l.verb + " " + l.outcome_name + " by " +
             magnitude + " " + (larger ? "additional" : "fewer") + " " + l.unit + " " +
             interval + " in " + l.second_period + " compared to " + l.first_period +
             " among " + l.group1_name +
             ". No claim is made that the passage of time alters the effect of " +
             l.treatment_name + "; the period may simply be associated with time-varying "
             "effects of " + l.treatment_name + ".";

    case EstimandKind::ATT_Period1:
    case EstimandKind::TripleDiffATT:
    case EstimandKind::BoundedATT: {
      const std::string who = estimand == EstimandKind::TripleDiffATT
                                  ? "treated units in " + l.group1_name
                                  : l.group1_name;
      const std::string caveat =
          " This is an average effect on the treated; " + l.group1_name +
          " may simply be associated with the size of the effect, which need not carry over "
          "to " + l.group0_name + ".";
      if (zero) {
        return "There was no estimated difference in " + l.outcome_name + " attributable to " +
               l.treatment_name + " among " + who + " in " + l.second_period + " " + interval +
               "." + caveat;
      }
      return l.treatment_name + " was estimated to " + (value > 0 ? "increase" : "reduce") +
             " " + l.outcome_name + " by " + magnitude + " " + l.unit + " " + interval +
             " on average among " + who + " in " + l.second_period + "." + caveat;
    }
  }
  return {};
}

}  // namespace

std::string render_interpretation(DesignKind design, EstimandKind estimand, double value,
                                  const Interval& ci, const InterpretationLabels& labels,
                                  double level, int precision) {
  // The estimand already encodes the design; the design only matters through it.
  (void)design;
  std::string s = sentence_for(estimand, value, ci, labels, level, precision);
  if (!s.empty() && s.front() >= 'a' && s.front() <= 'z') s.front() = static_cast<char>(s.front() - 'a' + 'A');
  return s;
}

std::string render_bounds(const Interval& bounds, const BoundsSpec& spec,
                          const InterpretationLabels& l, int precision) {
  return "Assuming the effect of " + l.treatment_name + " on " + l.outcome_name + " among " +
         l.group0_name + " lies between " + fixed(spec.tau_l, precision) + " and " +
         fixed(spec.tau_u, precision) + " " + l.unit + ", its effect among " + l.group1_name +
         " lies between " + fixed(bounds.lower, precision) + " and " +
         fixed(bounds.upper, precision) + " " + l.unit + ".";
}

Json to_json(const Interval& interval) {
  return Json{{"lower", interval.lower}, {"upper", interval.upper}};
}

Json to_json(const Estimate& e) {
  Json counts = Json::object();
  for (const auto& c : e.n_by_group) counts[c.label] = c.n;
  Json out{{"value", e.value},
           {"estimand", std::string(to_string(e.estimand))},
           {"method", std::string(to_string(e.method))},
           {"design", std::string(to_string(e.design))},
           {"n_by_group", counts}};
  out["contrast"] = e.contrast ? Json{{"g", e.contrast->first}, {"g_prime", e.contrast->second}}
                               : Json(nullptr);
  out["n_trimmed"] = e.n_trimmed;
  return out;
}

Json to_json(const InferenceResult& inf, double level) {
  return Json{{"point", inf.point},
              {"se", inf.se},
              {"level", level},
              {"ci_percentile", to_json(inf.ci_percentile)},
              {"ci_normal", to_json(inf.ci_normal)},
              {"replicates", inf.replicates},
              {"n_failed_replicates", inf.n_failed_replicates}};
}

Json to_json(const PreTrendResult& r, double level) {
  Json out{{"assessable", r.assessable}};
  if (r.assessable) {
    Json gaps = Json::array();
    for (const auto& g : r.per_period_gap) {
      gaps.push_back(Json{{"from", g.from}, {"to", g.to}, {"gap", g.gap}});
    }
    out["per_period_gap"] = gaps;
    out["pooled_gap"] = *r.pooled_gap;
    out["pooled_se"] = *r.pooled_se;
    out["level"] = level;
    out["ci"] = to_json(*r.ci);
  }
  out["verdict_note"] = r.verdict_note;
  return out;
}

Json to_json(const TruthReport& truth) {
  return Json{{"true_estimand", truth.true_estimand},
              {"expected_gdid_bias", truth.expected_gdid_bias},
              {"estimand", std::string(to_string(truth.estimand_kind))}};
}

Json to_json(const MonteCarloSummary& s) {
  Json out{{"reps", s.reps},
           {"n_failed", s.n_failed},
           {"truth", s.truth},
           {"mean_estimate", s.mean_estimate},
           {"mean_bias", s.mean_bias},
           {"sd", s.sd},
           {"mc_se", s.mc_se}};
  out["coverage"] = s.coverage ? Json(*s.coverage) : Json(nullptr);
  return out;
}

Json to_json(const DgpSpec& spec) {
  Json out{{"design", spec.triple ? std::string("triple") : std::string(to_string(spec.design))},
           {"n1", spec.n1},
           {"n0", spec.n0},
           {"alpha1", spec.alpha1},
           {"alpha0", spec.alpha0},
           {"delta", spec.delta},
           {"gamma", spec.gamma},
           {"tau00", spec.tau(0, 0)},
           {"tau01", spec.tau(0, 1)},
           {"tau10", spec.tau(1, 0)},
           {"tau11", spec.tau(1, 1)},
           {"sigma", spec.sigma},
           {"n_pre_periods", spec.n_pre_periods},
           {"gamma_pre", spec.gamma_pre},
           {"noise_correlation", spec.noise_correlation},
           {"effect_sd", spec.effect_sd}};
  if (spec.z) {
    out["z_shift"] = spec.z->shift;
    out["z_trend_loading"] = spec.z->trend_loading;
  }
  if (spec.triple) {
    out["triple_treated_share"] = spec.triple->treated_share;
    out["triple_arm_trend"] = spec.triple->arm_trend;
  }
  return out;
}

}  // namespace gdid
