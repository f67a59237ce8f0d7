#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmlm {

/// One dated scalar observation (asset return, index level, ...).
struct DatedValue {
  std::string date;  // ISO-8601 YYYY-MM-DD
  double value = 0.0;
};

/// Number of risk factors in the return model (market excess, size, value,
/// profitability, investment).
inline constexpr int kNumFactors = 5;

/// One period's factor realizations plus the risk-free rate, all as decimal
/// fractions per period.
struct FactorObservation {
  std::string date;
  std::array<double, kNumFactors> f{};  // mkt_rf, smb, hml, rmw, cma
  double rf = 0.0;
};

struct FactorSeries {
  std::vector<FactorObservation> observations;  // dates strictly increasing
};

/// Per-asset regression estimates: excess return on intercept + 5 factors.
struct FactorLoadings {
  std::string asset_id;
  double alpha = 0.0;
  Eigen::Matrix<double, kNumFactors, 1> betas =
      Eigen::Matrix<double, kNumFactors, 1>::Zero();
  double resid_variance = 0.0;  // RSS / (n - 6)
  std::size_t n_obs = 0;
};

/// Mean vector and covariance matrix for a universe of assets, together with
/// the per-period risk-free mean they were estimated against.
struct MarketMoments {
  std::vector<std::string> asset_ids;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  double rf = 0.0;
};

/// A portfolio's location in (sigma, mu) space with its Sharpe ratio fixed
/// against the risk-free rate supplied at construction.
struct PortfolioPoint {
  double mu_obs = 0.0;
  double sigma_obs = 0.0;  // > 0
  double lambda_obs = 0.0;  // (mu_obs - rf) / sigma_obs
};

/// Validating constructor for PortfolioPoint; raises non_positive_sigma
/// when sigma_obs <= 0 or any input is not finite.
PortfolioPoint make_portfolio_point(double mu_obs, double sigma_obs, double rf);

/// Ordinary least squares of the asset's excess return on an intercept and
/// the five factors, over the strict date intersection of the two series.
/// Requires >= 7 common dates and a full-rank regressor sample.
FactorLoadings fit_loadings(const std::string& asset_id,
                            const std::vector<DatedValue>& asset_returns,
                            const FactorSeries& factors);

/// Assembles universe moments from fitted loadings and the factor sample:
///   mu_i    = mean(rf) + alpha_i + betas_i . mean(f)
///   sigma   = B Cov(f) B' + diag(resid_variance)
/// Cov(f) uses the n-1 denominator.
MarketMoments estimate_moments(const std::vector<FactorLoadings>& loadings,
                               const FactorSeries& factors);

/// Evaluates a fully-invested portfolio against universe moments:
/// mu_obs = w.mu, sigma_obs = sqrt(w' Sigma w). Weights must match the
/// universe size and sum to 1 within 1e-9.
PortfolioPoint portfolio_moments(const Eigen::VectorXd& weights,
                                 const MarketMoments& moments);

}  // namespace cmlm
