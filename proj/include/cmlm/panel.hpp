#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cmlm {

/// One row of a panel: an (entity, time) cell with a response value and
/// named covariates (continuous regressors and 0/1 dummy columns alike).
struct PanelObservation {
  std::string entity_id;
  std::string time_id;
  double response = 0.0;
  std::map<std::string, double> covariates;
};

enum class Effects { none, time, entity, two_way };

const char* effects_name(Effects effects) noexcept;

/// Which columns to regress on and which group intercepts to absorb.
/// Interaction columns are elementwise products, appended after the
/// plain regressors and named "a x b".
struct RegressionSpec {
  Effects effects = Effects::none;
  std::vector<std::string> regressors;
  std::vector<std::pair<std::string, std::string>> interactions;
};

struct RegressionResult {
  std::vector<std::string> terms;  // column order of the fitted design
  std::map<std::string, double> coefficients;
  std::map<std::string, double> std_errors;
  std::map<std::string, double> p_values;
  std::map<std::string, std::string> stars;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double f_stat = 0.0;
  std::pair<long, long> f_df{0, 0};  // (numerator, denominator)
  long n_obs = 0;
};

/// Design matrix + response in the observations' row order. Adds an
/// all-ones "(Intercept)" column only when effects == none; group
/// intercepts are otherwise absorbed by demeaning in fit_panel.
struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
};

Design expand_design(const std::vector<PanelObservation>& observations,
                     const RegressionSpec& spec);

/// Demeans every column of `columns` in place by the chosen group
/// structure. One exact pass for one-way effects; alternating entity/time
/// passes (tolerance 1e-12 of the column scale, at most 100 sweeps) for
/// two-way. Each column is accumulated serially in row order so results
/// are bitwise-identical regardless of thread count; parallelism is
/// across columns only.
void within_demean(Eigen::MatrixXd& columns, const std::vector<int>& entity_of,
                   const std::vector<int>& time_of, int n_entities, int n_times,
                   Effects effects, bool parallel = true);

/// Within-estimator fit. Observations are re-sorted internally by
/// (entity_id, time_id), so permuting the input changes nothing, not
/// even the last bit. Degrees of freedom count absorbed group
/// intercepts as estimated parameters.
RegressionResult fit_panel(const std::vector<PanelObservation>& observations,
                           const RegressionSpec& spec, bool parallel = true);

/// Joint F test of all slopes from a completed fit. A fit with zero
/// slope columns has no test to run.
double f_statistic(const RegressionResult& result);

/// "" / "*" / "**" / "***" for p < 0.1 / 0.05 / 0.01.
std::string stars_for(double p_value);

/// Report-style text table: one row per coefficient with the standard
/// error parenthesized beneath, then Observations / R2 / Adjusted R2 /
/// F Statistic footer rows. `display_names` optionally maps raw term
/// names to presentation labels; `notes` lines are appended verbatim.
std::string format_table(const RegressionResult& result, const std::string& title,
                         const std::map<std::string, std::string>& display_names = {},
                         const std::vector<std::string>& notes = {});

/// Machine-readable companion: term,estimate,std_error,p_value,stars.
std::string format_result_csv(const RegressionResult& result);

}  // namespace cmlm
