#ifndef GDID_PANEL_HPP_
#define GDID_PANEL_HPP_

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdid {

using Index = Eigen::Index;

/// Which treatment layout the two periods instantiate.
///
///   Canonical     a0 = 0, a1 = G        (treated vs control, untreated first period)
///   PrePost       a0 = 0, a1 = 1        (everyone treated in the second period)
///   NoPrePeriod   a0 = a1 = G           (group is the treatment in both periods)
///
/// For a numeric dose G the indicator "a = G" is read as a = 1[G > 0]. When
/// several layouts fit (only possible with an empty side of G) the order of
/// preference is PrePost, Canonical, NoPrePeriod.
enum class DesignKind { Canonical, PrePost, NoPrePeriod, Unclassified };

std::string_view to_string(DesignKind design);
std::optional<DesignKind> parse_design(std::string_view text);

/// How the raw group column is turned into the numeric G stored per unit.
enum class GroupCoding {
  Binary,       // two distinct labels; the larger one (or the non-reference) is G=1
  Numeric,      // G parsed as a real number (dose, income, ...)
  Categorical,  // G = index into group_levels(); contrasted pairwise
};

std::string_view to_string(GroupCoding coding);

struct PanelUnit {
  std::string unit_id;
  double group = 0.0;
  int a0 = 0;
  int a1 = 0;
  double y0 = 0.0;
  double y1 = 0.0;
  std::vector<double> covariates;
  std::vector<double> pre_outcomes;  // oldest first: t = -k, ..., -1
};

struct ColumnMapping {
  std::string unit_id = "unit";  // empty: ids are 1-based row numbers
  std::string group = "g";
  std::string a0 = "a0";
  std::string a1 = "a1";
  std::string y0 = "y0";
  std::string y1 = "y1";
  std::vector<std::string> covariates;
  std::vector<std::string> pre_periods;  // oldest first

  GroupCoding group_coding = GroupCoding::Binary;
  // Binary coding: the label that becomes G=0.
  std::optional<std::string> reference_level;
  // Skip rows with a missing mapped cell instead of failing.
  bool drop_incomplete = false;
};

/// Immutable column store of unit records.
///
/// Columns are held as Eigen vectors so estimators and resampling operate on
/// whole columns. Datasets produced by resample() may repeat unit ids; every
/// other construction path enforces unique ids.
class PanelDataset {
 public:
  PanelDataset(std::vector<PanelUnit> units,
               std::vector<std::string> covariate_names = {},
               std::vector<std::string> pre_period_names = {},
               GroupCoding coding = GroupCoding::Binary,
               std::vector<std::string> group_levels = {});

  Index size() const { return y0_.size(); }
  Index covariate_count() const { return covariates_.cols(); }
  Index pre_period_count() const { return pre_outcomes_.cols(); }

  const Eigen::VectorXd& group() const { return group_; }
  const Eigen::VectorXi& a0() const { return a0_; }
  const Eigen::VectorXi& a1() const { return a1_; }
  const Eigen::VectorXd& y0() const { return y0_; }
  const Eigen::VectorXd& y1() const { return y1_; }
  /// y1 - y0 per unit.
  const Eigen::VectorXd& delta() const { return delta_; }
  const Eigen::MatrixXd& covariates() const { return covariates_; }
  const Eigen::MatrixXd& pre_outcomes() const { return pre_outcomes_; }

  const std::vector<std::string>& covariate_names() const { return covariate_names_; }
  const std::vector<std::string>& pre_period_names() const { return pre_period_names_; }
  GroupCoding group_coding() const { return coding_; }
  /// Binary: {label of G=0, label of G=1}. Categorical: level labels by index.
  const std::vector<std::string>& group_levels() const { return group_levels_; }

  const std::string& unit_id(Index i) const { return (*ids_)[id_rows_[i]]; }
  PanelUnit unit(Index i) const;
  std::vector<PanelUnit> units() const;

  /// True when every G is exactly 0 or 1.
  bool has_binary_group() const;
  Index count_group(double g) const;

  /// Rows drawn (with repetition) from this dataset; used by the bootstrap.
  PanelDataset resample(std::span<const Index> rows) const;

  /// Column indices of the named covariates.
  std::vector<Index> covariate_columns(std::span<const std::string> names) const;

 private:
  PanelDataset() = default;

  std::shared_ptr<const std::vector<std::string>> ids_;
  std::vector<Index> id_rows_;
  Eigen::VectorXd group_;
  Eigen::VectorXi a0_;
  Eigen::VectorXi a1_;
  Eigen::VectorXd y0_;
  Eigen::VectorXd y1_;
  Eigen::VectorXd delta_;
  Eigen::MatrixXd covariates_;
  Eigen::MatrixXd pre_outcomes_;
  std::vector<std::string> covariate_names_;
  std::vector<std::string> pre_period_names_;
  GroupCoding coding_ = GroupCoding::Binary;
  std::vector<std::string> group_levels_;
};

/// Reads a comma-separated file with a header row. Extra columns are ignored.
/// Numbers are parsed with std::from_chars (locale independent, no '+' sign,
/// no thousands separators); "" and "NA" denote a missing cell.
PanelDataset load_csv(std::istream& source, const ColumnMapping& mapping);

/// Writes the dataset as CSV with columns unit,g,a0,a1,y0,y1 followed by the
/// covariate and pre-period columns. Reals are rendered with the shortest
/// representation that round-trips (std::to_chars), so load_csv on the output
/// with the returned mapping reproduces the dataset bit for bit.
ColumnMapping write_csv(std::ostream& sink, const PanelDataset& data);

DesignKind detect_design(const PanelDataset& data);

struct ValidatedPanel {
  PanelDataset data;
  DesignKind design;
  Index n1 = 0;
  Index n0 = 0;
};

ValidatedPanel validate(const PanelDataset& data, DesignKind declared);

struct GroupSummary {
  Index n = 0;
  double mean_y0 = 0.0;
  double mean_y1 = 0.0;
  double mean_delta = 0.0;
  std::optional<double> var_delta;  // absent for single-unit groups
};

/// Indexed by G: [0] is the G=0 group, [1] the G=1 group.
std::array<GroupSummary, 2> group_summary(const PanelDataset& data);

/// Units at categorical level `level` (coded G=1) and `reference` (G=0), as a
/// binary-coded dataset.
PanelDataset pairwise_contrast(const PanelDataset& data, std::string_view level,
                               std::string_view reference);

}  // namespace gdid

#endif  // GDID_PANEL_HPP_
