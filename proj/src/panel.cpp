#include "cmlm/panel.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "cmlm/csv.hpp"
#include "cmlm/errors.hpp"

namespace cmlm {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kDemeanTolerance = 1e-12;
constexpr int kMaxDemeanSweeps = 100;

double covariate_value(const PanelObservation& obs, const std::string& name) {
  auto it = obs.covariates.find(name);
  if (it == obs.covariates.end()) {
    fail(errc::unknown_regressor, "regressor '" + name + "' missing for entity '" +
                                      obs.entity_id + "' at time '" + obs.time_id + "'");
  }
  if (!std::isfinite(it->second)) {
    fail(errc::out_of_domain_value, "regressor '" + name + "' is not finite for entity '" +
                                        obs.entity_id + "' at time '" + obs.time_id + "'");
  }
  return it->second;
}

// Subtracts each group's mean from one column; returns the largest
// absolute mean removed. Serial row-order accumulation keeps the result
// independent of how callers partition work.
double demean_by_group(Eigen::Ref<Eigen::VectorXd> col, const std::vector<int>& group_of,
                       int n_groups, std::vector<double>& sums, std::vector<long>& counts) {
  sums.assign(static_cast<std::size_t>(n_groups), 0.0);
  counts.assign(static_cast<std::size_t>(n_groups), 0);
  const Eigen::Index n = col.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    sums[static_cast<std::size_t>(group_of[static_cast<std::size_t>(i)])] += col(i);
    counts[static_cast<std::size_t>(group_of[static_cast<std::size_t>(i)])] += 1;
  }
  double max_mean = 0.0;
  for (int g = 0; g < n_groups; ++g) {
    if (counts[static_cast<std::size_t>(g)] > 0) {
      sums[static_cast<std::size_t>(g)] /= static_cast<double>(counts[static_cast<std::size_t>(g)]);
      max_mean = std::max(max_mean, std::abs(sums[static_cast<std::size_t>(g)]));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    col(i) -= sums[static_cast<std::size_t>(group_of[static_cast<std::size_t>(i)])];
  }
  return max_mean;
}

void demean_one_column(Eigen::Ref<Eigen::VectorXd> col, const std::vector<int>& entity_of,
                       const std::vector<int>& time_of, int n_entities, int n_times,
                       Effects effects) {
  std::vector<double> sums;
  std::vector<long> counts;
  switch (effects) {
    case Effects::none:
      return;
    case Effects::entity:
      demean_by_group(col, entity_of, n_entities, sums, counts);
      return;
    case Effects::time:
      demean_by_group(col, time_of, n_times, sums, counts);
      return;
    case Effects::two_way: {
      const double scale = std::max(1.0, col.cwiseAbs().maxCoeff());
      for (int sweep = 0; sweep < kMaxDemeanSweeps; ++sweep) {
        double d1 = demean_by_group(col, entity_of, n_entities, sums, counts);
        double d2 = demean_by_group(col, time_of, n_times, sums, counts);
        if (std::max(d1, d2) <= kDemeanTolerance * scale) break;
      }
      return;
    }
  }
}

}  // namespace

const char* effects_name(Effects effects) noexcept {
  switch (effects) {
    case Effects::none: return "none";
    case Effects::time: return "time";
    case Effects::entity: return "entity";
    case Effects::two_way: return "two-way";
  }
  return "none";
}

Design expand_design(const std::vector<PanelObservation>& observations,
                     const RegressionSpec& spec) {
  const std::size_t n = observations.size();
  if (n == 0) fail(errc::empty_input, "no observations to build a design from");

  std::vector<std::string> names;
  if (spec.effects == Effects::none) names.push_back("(Intercept)");
  for (const auto& r : spec.regressors) names.push_back(r);
  for (const auto& [a, b] : spec.interactions) names.push_back(a + " x " + b);

  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      fail(errc::duplicate_column, "design column '" + name + "' appears twice");
    }
  }

  Design design;
  design.names = names;
  design.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(names.size()));
  design.y.resize(static_cast<Eigen::Index>(n));

  for (std::size_t i = 0; i < n; ++i) {
    const PanelObservation& obs = observations[i];
    if (!std::isfinite(obs.response)) {
      fail(errc::out_of_domain_value, "response is not finite for entity '" + obs.entity_id +
                                          "' at time '" + obs.time_id + "'");
    }
    design.y(static_cast<Eigen::Index>(i)) = obs.response;
    Eigen::Index j = 0;
    if (spec.effects == Effects::none) design.X(static_cast<Eigen::Index>(i), j++) = 1.0;
    for (const auto& r : spec.regressors) {
      design.X(static_cast<Eigen::Index>(i), j++) = covariate_value(obs, r);
    }
    for (const auto& [a, b] : spec.interactions) {
      design.X(static_cast<Eigen::Index>(i), j++) =
          covariate_value(obs, a) * covariate_value(obs, b);
    }
  }
  return design;
}

void within_demean(Eigen::MatrixXd& columns, const std::vector<int>& entity_of,
                   const std::vector<int>& time_of, int n_entities, int n_times,
                   Effects effects, bool parallel) {
  if (effects == Effects::none) return;
  const Eigen::Index k = columns.cols();
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < k; ++j) {
      demean_one_column(columns.col(j), entity_of, time_of, n_entities, n_times, effects);
    }
    return;
  }
#else
  (void)parallel;
#endif
  for (Eigen::Index j = 0; j < k; ++j) {
    demean_one_column(columns.col(j), entity_of, time_of, n_entities, n_times, effects);
  }
}

RegressionResult fit_panel(const std::vector<PanelObservation>& observations,
                           const RegressionSpec& spec, bool parallel) {
  if (observations.empty()) {
    fail(errc::too_few_observations, "panel has no observations");
  }

  // Canonical row order: makes every output invariant to input
  // permutation down to the last bit.
  std::vector<const PanelObservation*> ptrs(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) ptrs[i] = &observations[i];
  std::sort(ptrs.begin(), ptrs.end(), [](const PanelObservation* a, const PanelObservation* b) {
    if (a->entity_id != b->entity_id) return a->entity_id < b->entity_id;
    return a->time_id < b->time_id;
  });
  std::vector<PanelObservation> sorted;
  sorted.reserve(ptrs.size());
  for (const auto* p : ptrs) sorted.push_back(*p);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].entity_id == sorted[i - 1].entity_id &&
        sorted[i].time_id == sorted[i - 1].time_id) {
      fail(errc::duplicate_key, "entity '" + sorted[i].entity_id + "' appears twice at time '" +
                                    sorted[i].time_id + "'");
    }
  }

  Design design = expand_design(sorted, spec);
  const Eigen::Index n = design.y.size();
  const Eigen::Index k_cols = design.X.cols();

  // Group indices in first-appearance (= lexicographic) order.
  std::map<std::string, int> entity_index, time_index;
  std::vector<int> entity_of(sorted.size()), time_of(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    entity_of[i] = entity_index.emplace(sorted[i].entity_id,
                                        static_cast<int>(entity_index.size())).first->second;
    time_of[i] = time_index.emplace(sorted[i].time_id,
                                    static_cast<int>(time_index.size())).first->second;
  }
  const int n_entities = static_cast<int>(entity_index.size());
  const int n_times = static_cast<int>(time_index.size());

  long params = 0;
  switch (spec.effects) {
    case Effects::none: params = static_cast<long>(k_cols); break;
    case Effects::time: params = static_cast<long>(k_cols) + n_times; break;
    case Effects::entity: params = static_cast<long>(k_cols) + n_entities; break;
    case Effects::two_way:
      params = static_cast<long>(k_cols) + n_entities + n_times - 1;
      break;
  }
  if (static_cast<long>(n) <= params) {
    fail(errc::too_few_observations,
         "need more than " + std::to_string(params) + " observations, have " + std::to_string(n));
  }

  Eigen::VectorXd column_scale(k_cols);
  for (Eigen::Index j = 0; j < k_cols; ++j) {
    column_scale(j) = std::max(1.0, design.X.col(j).cwiseAbs().maxCoeff());
  }

  // Absorb group intercepts: demean X and y together in one pass.
  if (spec.effects != Effects::none) {
    Eigen::MatrixXd stacked(n, k_cols + 1);
    stacked.leftCols(k_cols) = design.X;
    stacked.col(k_cols) = design.y;
    within_demean(stacked, entity_of, time_of, n_entities, n_times, spec.effects, parallel);
    design.X = stacked.leftCols(k_cols);
    design.y = stacked.col(k_cols);

    for (Eigen::Index j = 0; j < k_cols; ++j) {
      if (design.X.col(j).cwiseAbs().maxCoeff() <= 1e-10 * column_scale(j)) {
        fail(errc::no_within_variation,
             "regressor '" + design.names[static_cast<std::size_t>(j)] +
                 "' is constant within every group under " + effects_name(spec.effects) +
                 " effects");
      }
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < k_cols) {
    fail(errc::rank_deficient, "design has rank " + std::to_string(qr.rank()) + " but " +
                                   std::to_string(k_cols) + " columns");
  }
  Eigen::VectorXd coef = qr.solve(design.y);
  Eigen::VectorXd fitted = design.X * coef;
  Eigen::VectorXd resid = design.y - fitted;
  const double rss = resid.squaredNorm();
  // Demeaning has already absorbed the grand mean, so the within total sum
  // of squares is the demeaned response's raw squared norm; centering again
  // would only reintroduce rounding noise.
  double tss;
  double ess;
  if (spec.effects == Effects::none) {
    const double y_mean = design.y.mean();
    tss = (design.y.array() - y_mean).matrix().squaredNorm();
    const double fitted_mean = fitted.mean();
    ess = (fitted.array() - fitted_mean).matrix().squaredNorm();
  } else {
    tss = design.y.squaredNorm();
    ess = fitted.squaredNorm();
  }

  const long df_den = static_cast<long>(n) - params;
  const double s2 = rss / static_cast<double>(df_den);

  Eigen::MatrixXd xtx = design.X.transpose() * design.X;
  Eigen::MatrixXd xtx_inv =
      xtx.ldlt().solve(Eigen::MatrixXd::Identity(k_cols, k_cols));

  RegressionResult result;
  result.terms = design.names;
  result.n_obs = static_cast<long>(n);
  result.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  result.adj_r_squared =
      1.0 - (1.0 - result.r_squared) * static_cast<double>(n - 1) / static_cast<double>(df_den);

  boost::math::students_t t_dist(static_cast<double>(df_den));
  for (Eigen::Index j = 0; j < k_cols; ++j) {
    const std::string& name = design.names[static_cast<std::size_t>(j)];
    const double est = coef(j);
    const double se = std::sqrt(std::max(0.0, s2 * xtx_inv(j, j)));
    double p;
    if (se > 0.0) {
      const double t = est / se;
      p = 2.0 * boost::math::cdf(boost::math::complement(t_dist, std::abs(t)));
    } else {
      p = est == 0.0 ? 1.0 : 0.0;  // exact fit: the slope is either certain or absent
    }
    result.coefficients[name] = est;
    result.std_errors[name] = se;
    result.p_values[name] = p;
    result.stars[name] = stars_for(p);
  }

  // Joint F over the slope columns (the intercept, when present, is not
  // a tested slope).
  const long k_slopes =
      static_cast<long>(k_cols) - (spec.effects == Effects::none ? 1 : 0);
  result.f_df = {k_slopes, df_den};
  if (k_slopes >= 1) {
    if (rss == 0.0) {
      result.f_stat = std::numeric_limits<double>::infinity();
    } else {
      // The explained sum of squares equals tss - rss by orthogonality but
      // does not cancel when the fit explains almost nothing.
      result.f_stat = (ess / static_cast<double>(k_slopes)) /
                      (rss / static_cast<double>(df_den));
    }
  } else {
    result.f_stat = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

double f_statistic(const RegressionResult& result) {
  if (result.f_df.first < 1) {
    fail(errc::no_slopes, "fit has no slope coefficients to test");
  }
  return result.f_stat;
}

std::string stars_for(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string format_table(const RegressionResult& result, const std::string& title,
                         const std::map<std::string, std::string>& display_names,
                         const std::vector<std::string>& notes) {
  auto shown = [&](const std::string& term) {
    auto it = display_names.find(term);
    return it == display_names.end() ? term : it->second;
  };
  std::size_t label_width = 12;
  for (const auto& term : result.terms) {
    label_width = std::max(label_width, shown(term).size());
  }
  label_width += 2;

  std::ostringstream out;
  const std::string rule(label_width + 24, '-');
  const std::string heavy(label_width + 24, '=');
  out << heavy << "\n";
  if (!title.empty()) out << title << "\n" << rule << "\n";
  for (const auto& term : result.terms) {
    const std::string label = shown(term);
    out << label << std::string(label_width - label.size(), ' ')
        << fixed3(result.coefficients.at(term)) << result.stars.at(term) << "\n";
    out << std::string(label_width, ' ') << "(" << fixed3(result.std_errors.at(term)) << ")\n";
  }
  out << rule << "\n";
  auto footer = [&](const std::string& label, const std::string& value) {
    out << label << std::string(label_width - label.size(), ' ') << value << "\n";
  };
  footer("Observations", std::to_string(result.n_obs));
  footer("R2", fixed3(result.r_squared));
  footer("Adjusted R2", fixed3(result.adj_r_squared));
  std::string f_line;
  if (std::isnan(result.f_stat)) {
    f_line = "n/a";
  } else if (std::isinf(result.f_stat)) {
    f_line = "inf";
  } else {
    f_line = fixed3(result.f_stat);
  }
  f_line += " (df = " + std::to_string(result.f_df.first) + "; " +
            std::to_string(result.f_df.second) + ")";
  footer("F Statistic", f_line);
  out << heavy << "\n";
  out << "Note: *p<0.1; **p<0.05; ***p<0.01\n";
  for (const auto& note : notes) out << note << "\n";
  return out.str();
}

std::string format_result_csv(const RegressionResult& result) {
  std::ostringstream out;
  out << "term,estimate,std_error,p_value,stars\n";
  for (const auto& term : result.terms) {
    out << term << "," << csv::format_decimal(result.coefficients.at(term)) << ","
        << csv::format_decimal(result.std_errors.at(term)) << ","
        << csv::format_decimal(result.p_values.at(term)) << "," << result.stars.at(term) << "\n";
  }
  return out.str();
}

}  // namespace cmlm
