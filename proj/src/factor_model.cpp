#include "cmlm/factor_model.hpp"

#include <algorithm>
#include <cmath>

#include "cmlm/errors.hpp"

namespace cmlm {

namespace {

constexpr int kParams = kNumFactors + 1;  // intercept + betas
constexpr double kRankTolerance = 1e-10;  // relative to largest singular value

}  // namespace

PortfolioPoint make_portfolio_point(double mu_obs, double sigma_obs, double rf) {
  if (!std::isfinite(mu_obs) || !std::isfinite(sigma_obs) || !std::isfinite(rf)) {
    fail(errc::non_positive_sigma, "portfolio point requires finite inputs");
  }
  if (sigma_obs <= 0.0) {
    fail(errc::non_positive_sigma, "portfolio standard deviation must be > 0");
  }
  PortfolioPoint p;
  p.mu_obs = mu_obs;
  p.sigma_obs = sigma_obs;
  p.lambda_obs = (mu_obs - rf) / sigma_obs;
  return p;
}

FactorLoadings fit_loadings(const std::string& asset_id,
                            const std::vector<DatedValue>& asset_returns,
                            const FactorSeries& factors) {
  // 1. Strict date intersection of the two series (both sorted ascending).
  std::vector<DatedValue> sorted = asset_returns;
  std::sort(sorted.begin(), sorted.end(),
            [](const DatedValue& a, const DatedValue& b) { return a.date < b.date; });

  std::vector<std::pair<double, const FactorObservation*>> rows;  // (r_i, factors)
  rows.reserve(sorted.size());
  std::size_t j = 0;
  for (const FactorObservation& obs : factors.observations) {
    while (j < sorted.size() && sorted[j].date < obs.date) ++j;
    if (j < sorted.size() && sorted[j].date == obs.date) {
      rows.emplace_back(sorted[j].value, &obs);
      ++j;
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < kParams + 1) {
    fail(errc::insufficient_data,
         "asset '" + asset_id + "': " + std::to_string(rows.size()) +
             " common dates with the factor series, need >= " + std::to_string(kParams + 1));
  }

  // 2. Excess return on intercept + factors.
  Eigen::MatrixXd x(n, kParams);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const FactorObservation& obs = *rows[static_cast<std::size_t>(r)].second;
    x(r, 0) = 1.0;
    for (int c = 0; c < kNumFactors; ++c) x(r, c + 1) = obs.f[static_cast<std::size_t>(c)];
    y(r) = rows[static_cast<std::size_t>(r)].first - obs.rf;
  }

  // 3. Rank-revealing least squares; never form normal equations.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTolerance);
  if (svd.rank() < kParams) {
    fail(errc::rank_deficient,
         "asset '" + asset_id + "': factor sample is collinear (rank " +
             std::to_string(svd.rank()) + " of " + std::to_string(kParams) + ")");
  }
  Eigen::VectorXd coef = svd.solve(y);

  FactorLoadings out;
  out.asset_id = asset_id;
  out.alpha = coef(0);
  out.betas = coef.tail(kNumFactors);
  out.n_obs = static_cast<std::size_t>(n);
  double rss = (y - x * coef).squaredNorm();
  out.resid_variance = rss / static_cast<double>(n - kParams);
  return out;
}

MarketMoments estimate_moments(const std::vector<FactorLoadings>& loadings,
                               const FactorSeries& factors) {
  if (loadings.empty()) {
    fail(errc::empty_universe, "no fitted loadings to assemble moments from");
  }
  const auto n = static_cast<Eigen::Index>(factors.observations.size());
  if (n < 2) {
    fail(errc::insufficient_data, "factor sample needs >= 2 observations for a covariance");
  }

  // Factor sample mean, rf mean, and covariance (n-1 denominator).
  Eigen::MatrixXd f(n, kNumFactors);
  double rf_mean = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const FactorObservation& obs = factors.observations[static_cast<std::size_t>(t)];
    for (int c = 0; c < kNumFactors; ++c) f(t, c) = obs.f[static_cast<std::size_t>(c)];
    rf_mean += obs.rf;
  }
  rf_mean /= static_cast<double>(n);
  Eigen::RowVectorXd f_bar = f.colwise().mean();
  Eigen::MatrixXd centered = f.rowwise() - f_bar;
  Eigen::MatrixXd f_cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  const auto p = static_cast<Eigen::Index>(loadings.size());
  MarketMoments m;
  m.rf = rf_mean;
  m.asset_ids.reserve(loadings.size());
  m.mu.resize(p);
  Eigen::MatrixXd b(p, kNumFactors);
  Eigen::VectorXd resid(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const FactorLoadings& l = loadings[static_cast<std::size_t>(i)];
    m.asset_ids.push_back(l.asset_id);
    m.mu(i) = rf_mean + l.alpha + l.betas.dot(f_bar.transpose());
    b.row(i) = l.betas.transpose();
    resid(i) = l.resid_variance;
  }
  m.sigma = b * f_cov * b.transpose();
  m.sigma.diagonal() += resid;
  // Kill rounding asymmetry from the triple product.
  m.sigma = ((m.sigma + m.sigma.transpose()) * 0.5).eval();
  return m;
}

PortfolioPoint portfolio_moments(const Eigen::VectorXd& weights,
                                 const MarketMoments& moments) {
  if (weights.size() != moments.mu.size()) {
    fail(errc::dimension_mismatch,
         "weights have " + std::to_string(weights.size()) + " entries, universe has " +
             std::to_string(moments.mu.size()));
  }
  if (!weights.allFinite()) {
    fail(errc::weights_not_normalized, "weights contain non-finite entries");
  }
  double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    fail(errc::weights_not_normalized,
         "weights sum to " + std::to_string(total) + ", expected 1");
  }
  double mu_obs = weights.dot(moments.mu);
  double var = weights.dot(moments.sigma * weights);
  double sigma_obs = std::sqrt(std::max(var, 0.0));
  return make_portfolio_point(mu_obs, sigma_obs, moments.rf);
}

}  // namespace cmlm
