#include "cmlm/frontier.hpp"

#include <cmath>
#include <string>

#include "cmlm/errors.hpp"

namespace cmlm {

namespace {

// AC - B^2 at or below this (scaled) bound means mu is numerically
// proportional to e and the frontier collapses to a single point.
double degeneracy_tolerance(const FrontierCoefficients& c) {
  return 1e-12 * std::max(1.0, c.a_coef * c.c_coef);
}

}  // namespace

CapitalMarketLine make_cml(double rf, double mu_mkt, double sigma_mkt) {
  if (!(sigma_mkt > 0.0) || !std::isfinite(sigma_mkt) || !std::isfinite(mu_mkt) ||
      !std::isfinite(rf)) {
    fail(errc::non_positive_sigma, "market standard deviation must be finite and > 0");
  }
  double lambda = (mu_mkt - rf) / sigma_mkt;
  if (!(lambda > 0.0)) {
    fail(errc::negative_sharpe_market,
         "market Sharpe ratio " + std::to_string(lambda) + " is not positive");
  }
  return CapitalMarketLine{rf, mu_mkt, sigma_mkt, lambda};
}

FrontierSolver::FrontierSolver(const MarketMoments& moments) : mu_(moments.mu) {
  const Eigen::Index p = moments.mu.size();
  if (p == 0) {
    fail(errc::empty_universe, "cannot build a frontier over zero assets");
  }
  if (moments.sigma.rows() != p || moments.sigma.cols() != p) {
    fail(errc::dimension_mismatch, "covariance dimensions do not match the mean vector");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(moments.sigma);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    // LLT accepts exactly-singular inputs by producing zero/NaN pivots;
    // require strictly positive, finite diagonal factors.
    Eigen::VectorXd d = llt.matrixLLT().diagonal();
    ok = d.allFinite() && (d.array() > 0.0).all();
  }
  if (!ok) {
    fail(errc::singular_covariance, "covariance matrix is not positive definite");
  }

  sigma_inv_mu_ = llt.solve(mu_);
  sigma_inv_e_ = llt.solve(Eigen::VectorXd::Ones(p));
  coef_.a_coef = mu_.dot(sigma_inv_mu_);
  coef_.b_coef = mu_.dot(sigma_inv_e_);
  coef_.c_coef = sigma_inv_e_.sum();
  if (!std::isfinite(coef_.a_coef) || !std::isfinite(coef_.b_coef) ||
      !std::isfinite(coef_.c_coef)) {
    fail(errc::singular_covariance, "covariance solves produced non-finite coefficients");
  }
}

std::pair<CapitalMarketLine, Eigen::VectorXd> FrontierSolver::tangency(double rf) const {
  double d = coef_.b_coef - coef_.c_coef * rf;
  if (d <= 0.0) {
    fail(errc::tangency_undefined,
         "rf = " + std::to_string(rf) + " is not below the minimum-variance return " +
             std::to_string(coef_.b_coef / coef_.c_coef));
  }
  double excess_form = coef_.a_coef - 2.0 * coef_.b_coef * rf + coef_.c_coef * rf * rf;
  double mu_mkt = (coef_.a_coef - coef_.b_coef * rf) / d;
  double sigma_mkt = std::sqrt(excess_form) / d;
  if (!(sigma_mkt > 0.0) || !std::isfinite(sigma_mkt)) {
    fail(errc::singular_covariance, "tangency standard deviation is not positive");
  }
  double lambda = (mu_mkt - rf) / sigma_mkt;
  if (!(lambda > 0.0)) {
    fail(errc::negative_sharpe_market,
         "tangency Sharpe ratio " + std::to_string(lambda) + " is not positive");
  }

  Eigen::VectorXd w = (sigma_inv_mu_ - rf * sigma_inv_e_) / d;
  return {CapitalMarketLine{rf, mu_mkt, sigma_mkt, lambda}, std::move(w)};
}

FrontierWeights FrontierSolver::weights_for_return(double target_return) const {
  double disc = coef_.discriminant();
  if (disc <= degeneracy_tolerance(coef_)) {
    fail(errc::degenerate_frontier,
         "AC - B^2 = " + std::to_string(disc) + " (means proportional to ones)");
  }
  const double a = target_return;
  FrontierWeights out;
  // w = S^-1((C mu - B e) a + (A e - B mu)) / (AC - B^2), assembled from the
  // cached solves so no additional factorization is needed.
  out.weights = ((coef_.c_coef * a - coef_.b_coef) * sigma_inv_mu_ +
                 (coef_.a_coef - coef_.b_coef * a) * sigma_inv_e_) /
                disc;
  out.lambda_mult = 2.0 * (-a * coef_.c_coef + coef_.b_coef) / disc;
  out.nu_mult = 2.0 * (-coef_.a_coef + a * coef_.b_coef) / disc;
  out.target_return = a;
  return out;
}

FrontierCoefficients frontier_coefficients(const MarketMoments& moments) {
  return FrontierSolver(moments).coefficients();
}

std::pair<CapitalMarketLine, Eigen::VectorXd> tangency_portfolio(
    const MarketMoments& moments, double rf) {
  return FrontierSolver(moments).tangency(rf);
}

FrontierWeights frontier_weights(double target_return, const MarketMoments& moments) {
  return FrontierSolver(moments).weights_for_return(target_return);
}

double frontier_sigma(double target_return, const FrontierCoefficients& coeffs) {
  double disc = coeffs.discriminant();
  if (disc <= degeneracy_tolerance(coeffs)) {
    fail(errc::degenerate_frontier,
         "AC - B^2 = " + std::to_string(disc) + " (means proportional to ones)");
  }
  const double a = target_return;
  double var = (coeffs.c_coef * a * a - 2.0 * coeffs.b_coef * a + coeffs.a_coef) / disc;
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace cmlm
