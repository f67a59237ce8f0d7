#pragma once

#include <vector>

#include "cmlm/factor_model.hpp"
#include "cmlm/frontier.hpp"

namespace cmlm {

/// Foot of the perpendicular from an observed portfolio to the capital
/// market line, in (sigma, mu) coordinates.
struct ProjectedPoint {
  double mu_perp = 0.0;
  double sigma_perp = 0.0;
};

/// Everything implied about one observed portfolio: the risk-aversion
/// coefficient whose optimal mix reproduces the projection, the market
/// weight of that mix, the projection itself, and the signed distance.
struct RiskProfile {
  double theta = 0.0;   // > 0
  double w_star = 0.0;  // fraction of wealth in the market portfolio
  ProjectedPoint projected;
  double efficiency = 0.0;  // signed distance to the line
};

/// Orthogonal projection onto the line mu = rf + lambda * sigma:
///   mu_perp    = (l^2 mu + l sigma + rf) / (1 + l^2)
///   sigma_perp = (l mu + sigma - l rf)   / (1 + l^2)
/// Raises projection_out_of_domain when the foot falls at sigma_perp <= 0.
ProjectedPoint project_onto_cml(const PortfolioPoint& p, const CapitalMarketLine& cml);

/// Risk-aversion coefficient implied by the projection:
///   theta = ((1 + l^2) / sigma_obs) / (lambda_obs + 1/l)
/// Raises non_positive_risk_aversion when the denominator is <= 0.
double implied_risk_aversion(const PortfolioPoint& p, const CapitalMarketLine& cml);

/// Optimal market-portfolio weight for a given risk aversion:
///   w* = lambda_mkt / (theta * sigma_mkt), strictly decreasing in theta.
double optimal_weight(double theta, const CapitalMarketLine& cml);

/// Signed efficiency: Euclidean distance from the observed point to its
/// projection, positive iff the observed Sharpe ratio beats the market's,
/// exactly +0 on the line.
double efficiency(const PortfolioPoint& p, const CapitalMarketLine& cml);

/// Bundles projection, theta, w*, and efficiency in one shot.
RiskProfile profile_portfolio(const PortfolioPoint& p, const CapitalMarketLine& cml);

struct QuartileSummary {
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
};

/// Quantiles by linear interpolation between order statistics at position
/// (n-1)q. Raises empty_input on an empty list.
QuartileSummary quartiles(const std::vector<double>& values);

/// Keep-mask (1 = kept) for the interquartile-range outlier rule: kept iff
/// Q1 - k*IQR <= v <= Q3 + k*IQR. Raises empty_input / invalid_argument.
std::vector<char> iqr_filter(const std::vector<double>& values, double k = 1.5);

}  // namespace cmlm
