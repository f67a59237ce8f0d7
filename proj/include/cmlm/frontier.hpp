#pragma once

#include <utility>

#include <Eigen/Dense>

#include "cmlm/factor_model.hpp"

namespace cmlm {

/// Scalars of the frontier quadratic: A = mu' S^-1 mu, B = mu' S^-1 e,
/// C = e' S^-1 e, with e the all-ones vector.
struct FrontierCoefficients {
  double a_coef = 0.0;
  double b_coef = 0.0;
  double c_coef = 0.0;

  double discriminant() const { return a_coef * c_coef - b_coef * b_coef; }
};

/// The line in (sigma, mu) space from (0, rf) through the tangency portfolio.
struct CapitalMarketLine {
  double rf = 0.0;
  double mu_mkt = 0.0;
  double sigma_mkt = 0.0;   // > 0
  double lambda_mkt = 0.0;  // (mu_mkt - rf) / sigma_mkt, > 0
};

/// Validating constructor: sigma_mkt must be > 0 and the implied slope
/// positive (a downward line has no meaningful projection geometry).
CapitalMarketLine make_cml(double rf, double mu_mkt, double sigma_mkt);

/// Minimum-variance weights for one target return, with the multipliers of
/// the two equality constraints (first-order condition 2 S w + l mu + n e = 0).
struct FrontierWeights {
  Eigen::VectorXd weights;
  double lambda_mult = 0.0;
  double nu_mult = 0.0;
  double target_return = 0.0;
};

/// Cholesky-backed frontier queries. The covariance is factored once per
/// universe and the two solves S^-1 mu, S^-1 e are cached and reused by
/// every downstream quantity (coefficients, tangency, frontier weights).
class FrontierSolver {
 public:
  /// Raises singular_covariance unless sigma is positive definite,
  /// empty_universe on a zero-asset universe.
  explicit FrontierSolver(const MarketMoments& moments);

  const FrontierCoefficients& coefficients() const { return coef_; }

  /// Tangency portfolio for a given risk-free rate. Requires
  /// B - C rf > 0 (rf below the minimum-variance return); raises
  /// tangency_undefined otherwise, negative_sharpe_market on a flat or
  /// downward line.
  std::pair<CapitalMarketLine, Eigen::VectorXd> tangency(double rf) const;

  /// Frontier weights hitting a target mean return; raises
  /// degenerate_frontier when AC - B^2 is at or below tolerance.
  FrontierWeights weights_for_return(double target_return) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::VectorXd sigma_inv_mu_;
  Eigen::VectorXd sigma_inv_e_;
  FrontierCoefficients coef_;
};

/// One-shot convenience wrappers; each factors the covariance once.
FrontierCoefficients frontier_coefficients(const MarketMoments& moments);
std::pair<CapitalMarketLine, Eigen::VectorXd> tangency_portfolio(
    const MarketMoments& moments, double rf);
FrontierWeights frontier_weights(double target_return, const MarketMoments& moments);

/// Frontier standard deviation at a target return:
/// sqrt((C a^2 - 2 B a + A) / (AC - B^2)), minimized at a = B/C.
double frontier_sigma(double target_return, const FrontierCoefficients& coeffs);

}  // namespace cmlm
