#include "cmlm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmlm/errors.hpp"

namespace cmlm {

ProjectedPoint project_onto_cml(const PortfolioPoint& p, const CapitalMarketLine& cml) {
  const double l = cml.lambda_mkt;
  const double denom = 1.0 + l * l;
  ProjectedPoint out;
  out.mu_perp = (l * l * p.mu_obs + l * p.sigma_obs + cml.rf) / denom;
  out.sigma_perp = (l * p.mu_obs + p.sigma_obs - l * cml.rf) / denom;
  if (!(out.sigma_perp > 0.0)) {
    fail(errc::projection_out_of_domain,
         "projection falls at sigma = " + std::to_string(out.sigma_perp) +
             " (nonpositive risk)");
  }
  return out;
}

double implied_risk_aversion(const PortfolioPoint& p, const CapitalMarketLine& cml) {
  const double l = cml.lambda_mkt;
  const double denom = p.lambda_obs + 1.0 / l;
  if (!(denom > 0.0)) {
    fail(errc::non_positive_risk_aversion,
         "projection falls at or below zero risk (lambda_obs + 1/lambda_mkt = " +
             std::to_string(denom) + ")");
  }
  return ((1.0 + l * l) / p.sigma_obs) / denom;
}

double optimal_weight(double theta, const CapitalMarketLine& cml) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    fail(errc::non_positive_theta,
         "risk aversion must be > 0, got " + std::to_string(theta));
  }
  return cml.lambda_mkt / (theta * cml.sigma_mkt);
}

double efficiency(const PortfolioPoint& p, const CapitalMarketLine& cml) {
  ProjectedPoint proj = project_onto_cml(p, cml);
  if (p.lambda_obs == cml.lambda_mkt) return +0.0;  // exactly on the line
  double dmu = p.mu_obs - proj.mu_perp;
  double dsigma = p.sigma_obs - proj.sigma_perp;
  double dist = std::sqrt(dmu * dmu + dsigma * dsigma);
  // The projected point sits on the line, so its Sharpe ratio is the
  // market's; above-market Sharpe means the point lies above the line.
  return p.lambda_obs > cml.lambda_mkt ? dist : -dist;
}

RiskProfile profile_portfolio(const PortfolioPoint& p, const CapitalMarketLine& cml) {
  RiskProfile out;
  out.projected = project_onto_cml(p, cml);
  out.theta = implied_risk_aversion(p, cml);
  out.w_star = optimal_weight(out.theta, cml);
  if (p.lambda_obs == cml.lambda_mkt) {
    out.efficiency = +0.0;
  } else {
    double dmu = p.mu_obs - out.projected.mu_perp;
    double dsigma = p.sigma_obs - out.projected.sigma_perp;
    double dist = std::sqrt(dmu * dmu + dsigma * dsigma);
    out.efficiency = p.lambda_obs > cml.lambda_mkt ? dist : -dist;
  }
  return out;
}

namespace {

// Linear interpolation between order statistics at position (n-1)q.
double interpolated_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  double pos = static_cast<double>(n - 1) * q;
  auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

QuartileSummary quartiles(const std::vector<double>& values) {
  if (values.empty()) {
    fail(errc::empty_input, "quartiles of an empty list");
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  return QuartileSummary{interpolated_quantile(sorted, 0.25),
                         interpolated_quantile(sorted, 0.50),
                         interpolated_quantile(sorted, 0.75)};
}

std::vector<char> iqr_filter(const std::vector<double>& values, double k) {
  if (values.empty()) {
    fail(errc::empty_input, "iqr_filter of an empty list");
  }
  if (!(k >= 0.0)) {
    fail(errc::invalid_argument, "iqr_filter fence multiplier must be >= 0");
  }
  QuartileSummary q = quartiles(values);
  double iqr = q.q75 - q.q25;
  double lo = q.q25 - k * iqr;
  double hi = q.q75 + k * iqr;
  std::vector<char> kept(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    kept[i] = (values[i] >= lo && values[i] <= hi) ? 1 : 0;
  }
  return kept;
}

}  // namespace cmlm
