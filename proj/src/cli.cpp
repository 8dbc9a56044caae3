#include "gdid/cli.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gdid/dgp.hpp"
#include "gdid/diagnostics.hpp"
#include "gdid/error.hpp"
#include "gdid/estimators.hpp"
#include "gdid/inference.hpp"
#include "gdid/panel.hpp"
#include "gdid/report.hpp"

namespace gdid {

namespace {

struct DataFlags {
  std::string input;
  std::string design = "auto";
  std::string id_col = "unit";
  std::string group_col = "g";
  std::string a0_col = "a0";
  std::string a1_col = "a1";
  std::string y0_col = "y0";
  std::string y1_col = "y1";
  std::vector<std::string> covariates;
  std::vector<std::string> pre_cols;
  std::string group_type = "binary";
  std::string reference;
  bool drop_incomplete = false;
  int boot = 1999;
  std::uint64_t seed = 0;
  double level = 0.95;
  unsigned threads = 0;
};

struct EstimateFlags {
  std::string method = "auto";
  std::vector<std::string> contrast;
  std::vector<double> bounds;
  int degree = 1;
  bool allow_extrapolation = false;
  double trim = 0.01;
  InterpretationLabels labels;
};

struct SimulateFlags {
  std::string spec;
  int reps = 500;
  std::uint64_t seed = 0;
  std::string estimator = "simple";
  int boot = 0;
  double level = 0.95;
  unsigned threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, what + ": not a number: '" + text + "'");
  }
  return v;
}

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--input", f.input, "CSV file with a header row")->required();
  cmd->add_option("--design", f.design, "auto|canonical|prepost|nopre|triple");
  cmd->add_option("--id-col", f.id_col, "unit id column (empty: row numbers)");
  cmd->add_option("--group-col", f.group_col, "group column G");
  cmd->add_option("--a0-col", f.a0_col, "first-period treatment column");
  cmd->add_option("--a1-col", f.a1_col, "second-period treatment column");
  cmd->add_option("--y0-col", f.y0_col, "first-period outcome column");
  cmd->add_option("--y1-col", f.y1_col, "second-period outcome column");
  cmd->add_option("--covariates", f.covariates, "covariate columns Z")->delimiter(',');
  cmd->add_option("--pre-cols", f.pre_cols, "pre-baseline outcome columns, oldest first")
      ->delimiter(',');
  cmd->add_option("--group-type", f.group_type, "binary|numeric|categorical");
  cmd->add_option("--reference", f.reference, "group label coded as the reference (G=0)");
  cmd->add_flag("--drop-incomplete", f.drop_incomplete, "skip rows with missing mapped cells");
  cmd->add_option("--boot", f.boot, "bootstrap replicates");
  cmd->add_option("--seed", f.seed, "bootstrap seed");
  cmd->add_option("--level", f.level, "confidence level");
  cmd->add_option("--threads", f.threads, "worker threads (default: GDID_THREADS or all cores)");
}

ColumnMapping mapping_from(const DataFlags& f) {
  ColumnMapping m;
  m.unit_id = f.id_col;
  m.group = f.group_col;
  m.a0 = f.a0_col;
  m.a1 = f.a1_col;
  m.y0 = f.y0_col;
  m.y1 = f.y1_col;
  m.covariates = f.covariates;
  m.pre_periods = f.pre_cols;
  m.drop_incomplete = f.drop_incomplete;
  if (f.group_type == "binary") {
    m.group_coding = GroupCoding::Binary;
    if (!f.reference.empty()) m.reference_level = f.reference;
  } else if (f.group_type == "numeric") {
    m.group_coding = GroupCoding::Numeric;
  } else if (f.group_type == "categorical") {
    m.group_coding = GroupCoding::Categorical;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown --group-type '" + f.group_type + "'");
  }
  return m;
}

BootstrapConfig bootstrap_from(const DataFlags& f) {
  BootstrapConfig cfg;
  cfg.replicates = f.boot;
  cfg.seed = f.seed;
  cfg.level = f.level;
  cfg.threads = f.threads;
  if (cfg.replicates < 1) throw Error(ErrorCode::InvalidArgument, "--boot must be at least 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "--level must lie in (0, 1)");
  }
  return cfg;
}

Json data_config(const DataFlags& f) {
  return Json{{"input", f.input},
              {"design", f.design},
              {"id_col", f.id_col},
              {"group_col", f.group_col},
              {"a0_col", f.a0_col},
              {"a1_col", f.a1_col},
              {"y0_col", f.y0_col},
              {"y1_col", f.y1_col},
              {"covariates", f.covariates},
              {"pre_cols", f.pre_cols},
              {"group_type", f.group_type},
              {"reference", f.reference},
              {"drop_incomplete", f.drop_incomplete},
              {"boot", f.boot},
              {"seed", f.seed},
              {"level", f.level}};
}

struct Loaded {
  PanelDataset data;
  std::string sha256;
};

Loaded load(const DataFlags& f) {
  const std::string bytes = read_file(f.input);
  std::istringstream in(bytes);
  return Loaded{load_csv(in, mapping_from(f)), sha256_hex(bytes)};
}

// Design for a binary or dose dataset: declared (validated) or detected.
DesignKind resolve_design(const PanelDataset& data, const std::string& flag, bool check_groups) {
  if (flag == "auto") {
    const DesignKind detected = detect_design(data);
    if (detected == DesignKind::Unclassified) {
      throw Error(ErrorCode::UnclassifiedDesign,
                  "treatment columns match no supported design; pass --design explicitly");
    }
    if (check_groups) validate(data, detected);
    return detected;
  }
  const auto declared = parse_design(flag);
  if (!declared || *declared == DesignKind::Unclassified) {
    throw Error(ErrorCode::InvalidArgument, "unknown --design '" + flag + "'");
  }
  if (check_groups) {
    validate(data, *declared);
  } else if (detect_design(data) != *declared) {
    throw Error(ErrorCode::DesignMismatch,
                "data look " + std::string(to_string(detect_design(data))) + " but " +
                    std::string(to_string(*declared)) + " was declared");
  }
  return *declared;
}

Json build_estimate_report(const PanelDataset& data, const std::string& design_flag,
                           Method method, const EstimateFlags& ef, const DataFlags& df,
                           const BootstrapConfig& cfg, std::ostream& err) {
  const bool triple = method == Method::Triple;
  const bool numeric_group = data.group_coding() == GroupCoding::Numeric;
  const DesignKind design =
      triple ? detect_design(data)
             : resolve_design(data, design_flag, !(numeric_group && method == Method::Continuous));

  std::function<Estimate(const PanelDataset&)> estimator;
  switch (method) {
    case Method::Simple:
      estimator = [design](const PanelDataset& d) { return gdid_simple(d, design); };
      break;
    case Method::Ipw: {
      IpwOptions opts;
      opts.covariates = df.covariates;
      opts.trim = ef.trim;
      estimator = [design, opts](const PanelDataset& d) { return gdid_ipw(d, design, opts); };
      break;
    }
    case Method::Continuous: {
      double g = 1.0;
      double g_prime = 0.0;
      if (!ef.contrast.empty()) {
        if (ef.contrast.size() != 2) {
          throw Error(ErrorCode::InvalidArgument, "--contrast takes two values g,g'");
        }
        g = parse_real(ef.contrast[0], "--contrast");
        g_prime = parse_real(ef.contrast[1], "--contrast");
      } else if (numeric_group) {
        throw Error(ErrorCode::InvalidArgument, "a numeric group needs --contrast g,g'");
      }
      ContinuousOptions opts;
      opts.degree = ef.degree;
      opts.allow_extrapolation = ef.allow_extrapolation;
      estimator = [=](const PanelDataset& d) {
        return gdid_continuous(d, design, g, g_prime, opts);
      };
      break;
    }
    case Method::Triple:
      estimator = [](const PanelDataset& d) { return triple_differences(d); };
      break;
  }

  const Estimate estimate = estimator(data);
  const InferenceResult inference =
      bootstrap(data, [&](const PanelDataset& d) { return estimator(d).value; }, cfg);

  Json report{{"schema", kReportSchema}, {"command", "estimate"}};
  report["design"] = triple ? std::string("Triple") : std::string(to_string(design));
  report["estimand"] = std::string(to_string(estimate.estimand));
  report["method"] = std::string(to_string(method));
  report["value"] = estimate.value;
  report["estimate"] = to_json(estimate);
  Json inf = to_json(inference, cfg.level);
  inf["seed"] = cfg.seed;
  if (method == Method::Simple) {
    const auto summary = group_summary(data);
    inf["analytic_se"] =
        summary[0].n > 1 && summary[1].n > 1 ? Json(analytic_se_simple(data)) : Json(nullptr);
  }
  report["inference"] = inf;

  if (!ef.bounds.empty()) {
    if (ef.bounds.size() != 2) throw Error(ErrorCode::InvalidArgument, "--bounds takes tau_l,tau_u");
    const BoundsSpec spec{ef.bounds[0], ef.bounds[1]};
    const Interval b = apply_bounds(estimate, spec);
    const Interval outer{inference.ci_percentile.lower + spec.tau_l,
                         inference.ci_percentile.upper + spec.tau_u};
    report["bounds"] = Json{{"estimand", std::string(to_string(EstimandKind::BoundedATT))},
                            {"tau_l", spec.tau_l},
                            {"tau_u", spec.tau_u},
                            {"lower", b.lower},
                            {"upper", b.upper},
                            {"ci_outer", to_json(outer)},
                            {"interpretation", render_bounds(b, spec, ef.labels)}};
  } else {
    report["bounds"] = nullptr;
  }

  if (!triple && (data.pre_period_count() > 0 || design == DesignKind::NoPrePeriod)) {
    report["diagnostics"] = to_json(pretrends(data, design, cfg), cfg.level);
  } else {
    report["diagnostics"] = nullptr;
  }

  const std::string sentence = render_interpretation(
      design, estimate.estimand, estimate.value, inference.ci_percentile, ef.labels, cfg.level);
  report["interpretation"] = sentence;
  err << sentence << '\n';
  return report;
}

Json provenance(const std::string& sha, Json config, std::uint64_t seed) {
  return Json{{"input_sha256", sha},
              {"config", std::move(config)},
              {"tool_version", kToolVersion},
              {"seed", seed}};
}

int cmd_estimate(const DataFlags& df, const EstimateFlags& ef, std::ostream& out,
                 std::ostream& err) {
  const BootstrapConfig cfg = bootstrap_from(df);
  std::string method_text = ef.method;
  if (method_text == "auto") method_text = df.design == "triple" ? "triple" : "simple";
  const auto method = parse_method(method_text);
  if (!method) throw Error(ErrorCode::InvalidArgument, "unknown --method '" + ef.method + "'");
  if ((*method == Method::Triple) != (df.design == "triple") && df.design != "auto") {
    throw Error(ErrorCode::InvalidArgument, "--method triple goes with --design triple");
  }

  Json config = data_config(df);
  config["method"] = method_text;
  config["contrast"] = ef.contrast;
  config["bounds"] = ef.bounds;
  config["degree"] = ef.degree;
  config["allow_extrapolation"] = ef.allow_extrapolation;
  config["trim"] = ef.trim;

  const Loaded loaded = load(df);
  Json report;
  if (loaded.data.group_coding() == GroupCoding::Categorical) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (ef.contrast.size() == 2) {
      pairs.emplace_back(ef.contrast[0], ef.contrast[1]);
    } else if (ef.contrast.empty() && !df.reference.empty()) {
      for (const auto& level : loaded.data.group_levels()) {
        if (level != df.reference) pairs.emplace_back(level, df.reference);
      }
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "categorical groups need --contrast level,reference or --reference");
    }
    if (*method == Method::Continuous) {
      throw Error(ErrorCode::InvalidArgument, "categorical groups use simple, ipw or triple");
    }
    Json contrasts = Json::array();
    for (const auto& [level, reference] : pairs) {
      const PanelDataset pair = pairwise_contrast(loaded.data, level, reference);
      Json one = build_estimate_report(pair, df.design, *method, ef, df, cfg, err);
      one["contrast_levels"] = Json{{"level", level}, {"reference", reference}};
      contrasts.push_back(std::move(one));
    }
    report = Json{{"schema", kReportSchema}, {"command", "estimate"}, {"contrasts", contrasts}};
  } else {
    report = build_estimate_report(loaded.data, df.design, *method, ef, df, cfg, err);
  }
  report["provenance"] = provenance(loaded.sha256, config, cfg.seed);
  out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_pretrends(const DataFlags& df, std::ostream& out, std::ostream& err) {
  const BootstrapConfig cfg = bootstrap_from(df);
  if (df.design == "triple") {
    throw Error(ErrorCode::InvalidArgument, "pre-trends take canonical, prepost or nopre data");
  }
  const Loaded loaded = load(df);
  const DesignKind design = resolve_design(loaded.data, df.design, true);
  const PreTrendResult result = pretrends(loaded.data, design, cfg);
  Json report{{"schema", kReportSchema}, {"command", "pretrends"},
              {"design", std::string(to_string(design))}};
  const Json body = to_json(result, cfg.level);
  for (const auto& [key, value] : body.items()) report[key] = value;
  report["provenance"] = provenance(loaded.sha256, data_config(df), cfg.seed);
  err << result.verdict_note << '\n';
  out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateFlags& sf, std::ostream& out, std::ostream& err) {
  const std::string bytes = read_file(sf.spec);
  std::istringstream in(bytes);
  const DgpSpec spec = parse_spec(in);
  const auto method = parse_method(sf.estimator);
  if (!method) throw Error(ErrorCode::InvalidArgument, "unknown --estimator '" + sf.estimator + "'");
  if ((*method == Method::Triple) != spec.triple.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "the triple estimator goes with design = triple");
  }
  const DesignKind design = spec.design;
  EstimatorFn estimator;
  switch (*method) {
    case Method::Simple:
      estimator = [design](const PanelDataset& d) { return gdid_simple(d, design); };
      break;
    case Method::Ipw:
      estimator = [design](const PanelDataset& d) {
        IpwOptions opts;
        opts.covariates = d.covariate_names();
        return gdid_ipw(d, design, opts);
      };
      break;
    case Method::Continuous:
      estimator = [design](const PanelDataset& d) { return gdid_continuous(d, design, 1.0, 0.0); };
      break;
    case Method::Triple:
      estimator = [](const PanelDataset& d) { return triple_differences(d); };
      break;
  }
  std::optional<BootstrapConfig> ci;
  if (sf.boot > 0) {
    BootstrapConfig cfg;
    cfg.replicates = sf.boot;
    cfg.seed = sf.seed;
    cfg.level = sf.level;
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "--level must lie in (0, 1)");
    }
    ci = cfg;
  }
  const MonteCarloSummary summary = monte_carlo(spec, estimator, sf.reps, ci, sf.seed, sf.threads);
  const TruthReport truth = true_estimand(spec);

  Json config{{"spec", sf.spec},     {"reps", sf.reps},   {"seed", sf.seed},
              {"estimator", sf.estimator}, {"boot", sf.boot}, {"level", sf.level}};
  Json report{{"schema", kReportSchema},
              {"command", "simulate"},
              {"estimator", sf.estimator},
              {"spec", to_json(spec)},
              {"truth", to_json(truth)},
              {"summary", to_json(summary)},
              {"provenance", provenance(sha256_hex(bytes), config, sf.seed)}};
  err << "mean bias " << summary.mean_bias << " (mc_se " << summary.mc_se << ") over "
      << summary.reps << " replicates\n";
  out << report.dump(2) << '\n';
  return kExitOk;
}

int fail(std::ostream& out, std::ostream& err, const std::string& code, const std::string& message,
         std::optional<std::size_t> row, int exit_code) {
  Json error{{"code", code}, {"message", message}};
  error["row"] = row ? Json(*row) : Json(nullptr);
  out << Json{{"schema", kReportSchema}, {"error", error}}.dump(2) << '\n';
  err << "error [" << code << "]: " << message << '\n';
  return exit_code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group difference-in-differences estimators for two-period panels", "gdid"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  DataFlags estimate_data;
  EstimateFlags estimate_flags;
  auto* estimate = app.add_subcommand("estimate", "estimate a GDiD contrast with bootstrap CI");
  add_data_flags(estimate, estimate_data);
  estimate->add_option("--method", estimate_flags.method, "simple|ipw|continuous|triple");
  estimate->add_option("--contrast", estimate_flags.contrast,
                       "g,g' for continuous G or level,reference for categorical G")
      ->delimiter(',');
  estimate->add_option("--bounds", estimate_flags.bounds, "tau_l,tau_u bounds on the G=0 effect")
      ->delimiter(',');
  estimate->add_option("--degree", estimate_flags.degree, "polynomial degree for continuous G");
  estimate->add_flag("--allow-extrapolation", estimate_flags.allow_extrapolation,
                     "allow contrast levels outside the observed support");
  estimate->add_option("--trim", estimate_flags.trim, "propensity trimming threshold");
  auto& labels = estimate_flags.labels;
  estimate->add_option("--treatment-name", labels.treatment_name);
  estimate->add_option("--outcome-name", labels.outcome_name);
  estimate->add_option("--group1-name", labels.group1_name);
  estimate->add_option("--group0-name", labels.group0_name);
  estimate->add_option("--unit-name", labels.unit);
  estimate->add_option("--verb", labels.verb, "change|increase|reduce|...");
  estimate->add_option("--first-period", labels.first_period);
  estimate->add_option("--second-period", labels.second_period);

  DataFlags pretrend_data;
  auto* pretrend = app.add_subcommand("pretrends", "compare pre-baseline trends across groups");
  add_data_flags(pretrend, pretrend_data);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study on a synthetic world");
  simulate->add_option("--spec", sim.spec, "key = value world description")->required();
  simulate->add_option("--reps", sim.reps, "Monte Carlo replicates");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--estimator", sim.estimator, "simple|ipw|continuous|triple");
  simulate->add_option("--boot", sim.boot, "bootstrap replicates per dataset (0: no coverage)");
  simulate->add_option("--level", sim.level, "confidence level");
  simulate->add_option("--threads", sim.threads, "worker threads");

  std::vector<std::string> argv_storage = args;
  argv_storage.insert(argv_storage.begin(), "gdid");
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(out, err, "UsageError", e.what(), std::nullopt, kExitInvalid);
  }

  try {
    if (*estimate) return cmd_estimate(estimate_data, estimate_flags, out, err);
    if (*pretrend) return cmd_pretrends(pretrend_data, out, err);
    return cmd_simulate(sim, out, err);
  } catch (const Error& e) {
    return fail(out, err, std::string(to_string(e.code())), e.what(), e.row(),
                is_numerical(e.code()) ? kExitNumerical : kExitInvalid);
  }
}

}  // namespace gdid
