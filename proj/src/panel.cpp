#include "gdid/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "gdid/error.hpp"

namespace gdid {

std::string_view to_string(DesignKind design) {
  switch (design) {
    case DesignKind::Canonical: return "Canonical";
    case DesignKind::PrePost: return "PrePost";
    case DesignKind::NoPrePeriod: return "NoPrePeriod";
    case DesignKind::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::optional<DesignKind> parse_design(std::string_view text) {
  if (text == "canonical" || text == "Canonical") return DesignKind::Canonical;
  if (text == "prepost" || text == "PrePost") return DesignKind::PrePost;
  if (text == "nopre" || text == "NoPrePeriod") return DesignKind::NoPrePeriod;
  if (text == "unclassified" || text == "Unclassified") return DesignKind::Unclassified;
  return std::nullopt;
}

std::string_view to_string(GroupCoding coding) {
  switch (coding) {
    case GroupCoding::Binary: return "binary";
    case GroupCoding::Numeric: return "numeric";
    case GroupCoding::Categorical: return "categorical";
  }
  return "binary";
}

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string("non-finite ") + what);
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool is_missing(std::string_view s) { return s.empty() || s == "NA"; }

// Numeric order when every label parses as a number, lexicographic otherwise.
std::vector<std::string> ordered_levels(const std::set<std::string>& labels) {
  std::vector<std::string> out(labels.begin(), labels.end());
  const bool numeric = std::all_of(out.begin(), out.end(), [](const std::string& l) {
    return parse_number(l).has_value();
  });
  if (numeric) {
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
  }
  return out;
}

struct RawRow {
  std::size_t row;  // 1-based data row
  std::string id;
  std::string group;
  std::vector<double> values;  // a0, a1, y0, y1, covariates..., pre...
};

}  // namespace

PanelDataset::PanelDataset(std::vector<PanelUnit> units,
                           std::vector<std::string> covariate_names,
                           std::vector<std::string> pre_period_names,
                           GroupCoding coding, std::vector<std::string> group_levels)
    : covariate_names_(std::move(covariate_names)),
      pre_period_names_(std::move(pre_period_names)),
      coding_(coding),
      group_levels_(std::move(group_levels)) {
  if (units.empty()) throw Error(ErrorCode::EmptyDataError, "dataset has no units");
  const Index n = static_cast<Index>(units.size());
  const Index k = static_cast<Index>(units.front().covariates.size());
  const Index p = static_cast<Index>(units.front().pre_outcomes.size());
  if (!covariate_names_.empty() && static_cast<Index>(covariate_names_.size()) != k) {
    throw Error(ErrorCode::ArityMismatch, "covariate names do not match covariate arity");
  }
  if (!pre_period_names_.empty() && static_cast<Index>(pre_period_names_.size()) != p) {
    throw Error(ErrorCode::ArityMismatch, "pre-period names do not match pre-period arity");
  }
  for (Index j = static_cast<Index>(covariate_names_.size()); j < k; ++j) {
    covariate_names_.push_back("z" + std::to_string(j + 1));
  }
  for (Index j = static_cast<Index>(pre_period_names_.size()); j < p; ++j) {
    pre_period_names_.push_back("y_m" + std::to_string(p - j));
  }

  auto ids = std::make_shared<std::vector<std::string>>();
  ids->reserve(units.size());
  std::unordered_set<std::string> seen;
  group_.resize(n);
  a0_.resize(n);
  a1_.resize(n);
  y0_.resize(n);
  y1_.resize(n);
  covariates_.resize(n, k);
  pre_outcomes_.resize(n, p);
  id_rows_.resize(units.size());

  for (Index i = 0; i < n; ++i) {
    PanelUnit& u = units[i];
    if (!seen.insert(u.unit_id).second) {
      throw Error(ErrorCode::DuplicateUnitId, "duplicate unit id '" + u.unit_id + "'");
    }
    if (static_cast<Index>(u.covariates.size()) != k ||
        static_cast<Index>(u.pre_outcomes.size()) != p) {
      throw Error(ErrorCode::ArityMismatch,
                  "unit '" + u.unit_id + "' has a different covariate or pre-period arity");
    }
    if ((u.a0 != 0 && u.a0 != 1) || (u.a1 != 0 && u.a1 != 1)) {
      throw Error(ErrorCode::InvalidArgument, "treatment indicators must be 0 or 1");
    }
    require_finite(u.group, "group value");
    require_finite(u.y0, "y0");
    require_finite(u.y1, "y1");
    group_[i] = u.group;
    a0_[i] = u.a0;
    a1_[i] = u.a1;
    y0_[i] = u.y0;
    y1_[i] = u.y1;
    for (Index j = 0; j < k; ++j) {
      require_finite(u.covariates[j], "covariate");
      covariates_(i, j) = u.covariates[j];
    }
    for (Index j = 0; j < p; ++j) {
      require_finite(u.pre_outcomes[j], "pre-period outcome");
      pre_outcomes_(i, j) = u.pre_outcomes[j];
    }
    ids->push_back(std::move(u.unit_id));
    id_rows_[i] = i;
  }
  if (coding_ == GroupCoding::Binary && !has_binary_group()) {
    throw Error(ErrorCode::InvalidArgument, "binary-coded group values must be 0 or 1");
  }
  if (coding_ == GroupCoding::Categorical) {
    for (Index i = 0; i < n; ++i) {
      const double g = group_[i];
      if (g < 0 || g != std::floor(g) || g >= static_cast<double>(group_levels_.size())) {
        throw Error(ErrorCode::InvalidArgument, "categorical group index out of range");
      }
    }
  }
  delta_ = y1_ - y0_;
  ids_ = std::move(ids);
}

PanelUnit PanelDataset::unit(Index i) const {
  PanelUnit u;
  u.unit_id = unit_id(i);
  u.group = group_[i];
  u.a0 = a0_[i];
  u.a1 = a1_[i];
  u.y0 = y0_[i];
  u.y1 = y1_[i];
  u.covariates.assign(covariates_.cols(), 0.0);
  for (Index j = 0; j < covariates_.cols(); ++j) u.covariates[j] = covariates_(i, j);
  u.pre_outcomes.assign(pre_outcomes_.cols(), 0.0);
  for (Index j = 0; j < pre_outcomes_.cols(); ++j) u.pre_outcomes[j] = pre_outcomes_(i, j);
  return u;
}

std::vector<PanelUnit> PanelDataset::units() const {
  std::vector<PanelUnit> out;
  out.reserve(size());
  for (Index i = 0; i < size(); ++i) out.push_back(unit(i));
  return out;
}

bool PanelDataset::has_binary_group() const {
  return ((group_.array() == 0.0) || (group_.array() == 1.0)).all();
}

Index PanelDataset::count_group(double g) const {
  return (group_.array() == g).count();
}

PanelDataset PanelDataset::resample(std::span<const Index> rows) const {
  PanelDataset out;
  out.ids_ = ids_;
  out.id_rows_.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out.id_rows_[r] = id_rows_[rows[r]];
  const std::vector<Index> idx(rows.begin(), rows.end());
  out.group_ = group_(idx);
  out.a0_ = a0_(idx);
  out.a1_ = a1_(idx);
  out.y0_ = y0_(idx);
  out.y1_ = y1_(idx);
  out.delta_ = delta_(idx);
  out.covariates_ = covariates_(idx, Eigen::all);
  out.pre_outcomes_ = pre_outcomes_(idx, Eigen::all);
  out.covariate_names_ = covariate_names_;
  out.pre_period_names_ = pre_period_names_;
  out.coding_ = coding_;
  out.group_levels_ = group_levels_;
  return out;
}

std::vector<Index> PanelDataset::covariate_columns(std::span<const std::string> names) const {
  std::vector<Index> cols;
  for (const auto& name : names) {
    auto it = std::find(covariate_names_.begin(), covariate_names_.end(), name);
    if (it == covariate_names_.end()) {
      throw Error(ErrorCode::MappingError, "unknown covariate '" + name + "'");
    }
    cols.push_back(static_cast<Index>(it - covariate_names_.begin()));
  }
  return cols;
}

PanelDataset load_csv(std::istream& source, const ColumnMapping& mapping) {
  std::string line;
  if (!std::getline(source, line) || trim(line).empty()) {
    throw Error(ErrorCode::EmptyDataError, "input has no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_row(line);
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) position.emplace(header[c], c);

  std::vector<std::string> used;
  auto locate = [&](const std::string& name) -> std::size_t {
    if (std::find(used.begin(), used.end(), name) != used.end()) {
      throw Error(ErrorCode::MappingError, "column '" + name + "' mapped more than once");
    }
    used.push_back(name);
    auto it = position.find(name);
    if (it == position.end()) {
      throw Error(ErrorCode::MappingError, "missing column '" + name + "'");
    }
    return it->second;
  };

  std::optional<std::size_t> id_col;
  if (!mapping.unit_id.empty()) id_col = locate(mapping.unit_id);
  const std::size_t group_col = locate(mapping.group);
  std::vector<std::size_t> numeric_cols = {locate(mapping.a0), locate(mapping.a1),
                                           locate(mapping.y0), locate(mapping.y1)};
  for (const auto& c : mapping.covariates) numeric_cols.push_back(locate(c));
  for (const auto& c : mapping.pre_periods) numeric_cols.push_back(locate(c));

  std::vector<RawRow> rows;
  std::set<std::string> labels;
  std::size_t row_no = 0;
  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(header.size()),
                  row_no);
    }
    bool incomplete = is_missing(cells[group_col]) || (id_col && is_missing(cells[*id_col]));
    for (std::size_t c : numeric_cols) incomplete = incomplete || is_missing(cells[c]);
    if (incomplete) {
      if (mapping.drop_incomplete) continue;
      throw Error(ErrorCode::MissingValue,
                  "row " + std::to_string(row_no) + " has a missing value", row_no);
    }
    RawRow raw;
    raw.row = row_no;
    raw.id = id_col ? std::string(cells[*id_col]) : std::to_string(row_no);
    raw.group = std::string(cells[group_col]);
    for (std::size_t c : numeric_cols) {
      auto v = parse_number(cells[c]);
      if (!v) {
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row_no) + ": column '" + std::string(header[c]) +
                        "' is not a number: '" + std::string(cells[c]) + "'",
                    row_no);
      }
      raw.values.push_back(*v);
    }
    for (int t = 0; t < 2; ++t) {
      if (raw.values[t] != 0.0 && raw.values[t] != 1.0) {
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row_no) + ": treatment indicator must be 0 or 1",
                    row_no);
      }
    }
    labels.insert(raw.group);
    rows.push_back(std::move(raw));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyDataError, "input has no data rows");

  std::vector<std::string> levels;
  std::unordered_map<std::string, double> code;
  switch (mapping.group_coding) {
    case GroupCoding::Binary: {
      if (labels.size() > 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "binary group column has " + std::to_string(labels.size()) + " distinct values");
      }
      levels = ordered_levels(labels);
      if (mapping.reference_level) {
        auto it = std::find(levels.begin(), levels.end(), *mapping.reference_level);
        if (it == levels.end()) {
          throw Error(ErrorCode::InvalidArgument,
                      "reference level '" + *mapping.reference_level + "' not present");
        }
        if (it != levels.begin()) std::iter_swap(levels.begin(), it);
      } else if (levels.size() == 1 && parse_number(levels[0]) == 1.0) {
        // A lone "1" stays G=1 so single-group files keep their coding.
        levels.insert(levels.begin(), "0");
      }
      for (std::size_t i = 0; i < levels.size(); ++i) code[levels[i]] = static_cast<double>(i);
      break;
    }
    case GroupCoding::Categorical:
      levels = ordered_levels(labels);
      for (std::size_t i = 0; i < levels.size(); ++i) code[levels[i]] = static_cast<double>(i);
      break;
    case GroupCoding::Numeric:
      break;
  }

  std::vector<PanelUnit> units;
  units.reserve(rows.size());
  const std::size_t k = mapping.covariates.size();
  for (auto& raw : rows) {
    PanelUnit u;
    u.unit_id = std::move(raw.id);
    if (mapping.group_coding == GroupCoding::Numeric) {
      auto g = parse_number(raw.group);
      if (!g) {
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(raw.row) + ": group value is not a number",
                    raw.row);
      }
      u.group = *g;
    } else {
      u.group = code.at(raw.group);
    }
    u.a0 = static_cast<int>(raw.values[0]);
    u.a1 = static_cast<int>(raw.values[1]);
    u.y0 = raw.values[2];
    u.y1 = raw.values[3];
    u.covariates.assign(raw.values.begin() + 4, raw.values.begin() + 4 + k);
    u.pre_outcomes.assign(raw.values.begin() + 4 + k, raw.values.end());
    units.push_back(std::move(u));
  }
  return PanelDataset(std::move(units), mapping.covariates, mapping.pre_periods,
                      mapping.group_coding, std::move(levels));
}

ColumnMapping write_csv(std::ostream& sink, const PanelDataset& data) {
  ColumnMapping mapping;
  mapping.covariates = data.covariate_names();
  mapping.pre_periods = data.pre_period_names();
  mapping.group_coding = data.group_coding();
  const auto& levels = data.group_levels();
  if (data.group_coding() == GroupCoding::Binary && !levels.empty()) {
    mapping.reference_level = levels.front();
  }
  auto group_text = [&](double g) {
    if (data.group_coding() == GroupCoding::Numeric) return format_double(g);
    const auto idx = static_cast<std::size_t>(g);
    return idx < levels.size() ? levels[idx] : format_double(g);
  };

  sink << "unit,g,a0,a1,y0,y1";
  for (const auto& n : data.covariate_names()) sink << ',' << n;
  for (const auto& n : data.pre_period_names()) sink << ',' << n;
  sink << '\n';
  for (Index i = 0; i < data.size(); ++i) {
    sink << data.unit_id(i) << ',' << group_text(data.group()[i]) << ',' << data.a0()[i]
         << ',' << data.a1()[i] << ',' << format_double(data.y0()[i]) << ','
         << format_double(data.y1()[i]);
    for (Index j = 0; j < data.covariate_count(); ++j) {
      sink << ',' << format_double(data.covariates()(i, j));
    }
    for (Index j = 0; j < data.pre_period_count(); ++j) {
      sink << ',' << format_double(data.pre_outcomes()(i, j));
    }
    sink << '\n';
  }
  return mapping;
}

DesignKind detect_design(const PanelDataset& data) {
  const Eigen::ArrayXi by_group = (data.group().array() > 0.0).cast<int>();
  const auto a0 = data.a0().array();
  const auto a1 = data.a1().array();
  const bool a0_zero = (a0 == 0).all();
  // Ties arise only when one side of G is empty; everyone treated at t=1 reads
  // as pre-post before canonical.
  if (a0_zero && (a1 == 1).all()) return DesignKind::PrePost;
  if (a0_zero && (a1 == by_group).all()) return DesignKind::Canonical;
  if ((a0 == by_group).all() && (a1 == by_group).all()) return DesignKind::NoPrePeriod;
  return DesignKind::Unclassified;
}

ValidatedPanel validate(const PanelDataset& data, DesignKind declared) {
  if (declared == DesignKind::Unclassified) {
    throw Error(ErrorCode::UnclassifiedDesign, "declared design must not be Unclassified");
  }
  const Index n1 = (data.group().array() > 0.0).count();
  const Index n0 = data.size() - n1;
  if (n1 == 0 || n0 == 0) {
    throw Error(ErrorCode::DegenerateGroup, "both groups must be non-empty");
  }
  const DesignKind detected = detect_design(data);
  if (detected != declared) {
    throw Error(ErrorCode::DesignMismatch,
                "data look " + std::string(to_string(detected)) + " but " +
                    std::string(to_string(declared)) + " was declared");
  }
  return ValidatedPanel{data, declared, n1, n0};
}

std::array<GroupSummary, 2> group_summary(const PanelDataset& data) {
  if (!data.has_binary_group()) {
    throw Error(ErrorCode::InvalidArgument, "group summary needs a 0/1 group");
  }
  std::array<GroupSummary, 2> out;
  for (int g = 0; g < 2; ++g) {
    const Eigen::ArrayXd mask = (data.group().array() == g).cast<double>();
    GroupSummary& s = out[g];
    s.n = static_cast<Index>(mask.sum());
    if (s.n == 0) {
      throw Error(ErrorCode::DegenerateGroup, "group " + std::to_string(g) + " is empty");
    }
    const double n = static_cast<double>(s.n);
    s.mean_y0 = (mask * data.y0().array()).sum() / n;
    s.mean_y1 = (mask * data.y1().array()).sum() / n;
    s.mean_delta = (mask * data.delta().array()).sum() / n;
    if (s.n > 1) {
      s.var_delta = (mask * (data.delta().array() - s.mean_delta).square()).sum() / (n - 1.0);
    }
  }
  return out;
}

PanelDataset pairwise_contrast(const PanelDataset& data, std::string_view level,
                               std::string_view reference) {
  if (data.group_coding() != GroupCoding::Categorical) {
    throw Error(ErrorCode::InvalidArgument, "pairwise contrasts need a categorical group");
  }
  if (level == reference) {
    throw Error(ErrorCode::InvalidArgument, "contrast level equals the reference level");
  }
  const auto& levels = data.group_levels();
  auto index_of = [&](std::string_view l) {
    auto it = std::find(levels.begin(), levels.end(), l);
    if (it == levels.end()) {
      throw Error(ErrorCode::InvalidArgument, "unknown group level '" + std::string(l) + "'");
    }
    return static_cast<double>(it - levels.begin());
  };
  const double g1 = index_of(level);
  const double g0 = index_of(reference);
  std::vector<PanelUnit> units;
  for (Index i = 0; i < data.size(); ++i) {
    const double g = data.group()[i];
    if (g != g1 && g != g0) continue;
    PanelUnit u = data.unit(i);
    u.group = (g == g1) ? 1.0 : 0.0;
    units.push_back(std::move(u));
  }
  return PanelDataset(std::move(units), data.covariate_names(), data.pre_period_names(),
                      GroupCoding::Binary, {std::string(reference), std::string(level)});
}

}  // namespace gdid
