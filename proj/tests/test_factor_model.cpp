#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmlm/errors.hpp"
#include "cmlm/factor_model.hpp"
#include "cmlm/rng.hpp"
#include "doctest.h"

using namespace cmlm;

namespace {

// A factor sample with enough spread for a well-conditioned regression.
FactorSeries make_factors(int n, std::uint64_t seed = 3) {
  CounterRng rng(seed, 1);
  FactorSeries series;
  for (int t = 0; t < n; ++t) {
    FactorObservation obs;
    char date[16];
    std::snprintf(date, sizeof date, "%04d-%02d-28", 1990 + t / 12, t % 12 + 1);
    obs.date = date;
    for (int j = 0; j < kNumFactors; ++j) {
      obs.f[static_cast<std::size_t>(j)] = 0.01 * rng.next_normal();
    }
    obs.rf = 0.0004;
    series.observations.push_back(obs);
  }
  return series;
}

std::vector<DatedValue> exact_returns(const FactorSeries& factors, double alpha,
                                      const Eigen::VectorXd& betas) {
  std::vector<DatedValue> out;
  for (const auto& obs : factors.observations) {
    double r = obs.rf + alpha;
    for (int j = 0; j < kNumFactors; ++j) {
      r += betas(j) * obs.f[static_cast<std::size_t>(j)];
    }
    out.push_back({obs.date, r});
  }
  return out;
}

}  // namespace

TEST_CASE("make_portfolio_point validates inputs") {
  auto p = make_portfolio_point(0.05, 0.15, 0.01);
  CHECK(p.mu_obs == 0.05);
  CHECK(p.sigma_obs == 0.15);
  CHECK(p.lambda_obs == doctest::Approx((0.05 - 0.01) / 0.15).epsilon(1e-15));

  CHECK_THROWS_AS(make_portfolio_point(0.05, 0.0, 0.01), Error);
  CHECK_THROWS_AS(make_portfolio_point(0.05, -0.1, 0.01), Error);
  CHECK_THROWS_AS(make_portfolio_point(std::nan(""), 0.1, 0.01), Error);
  try {
    make_portfolio_point(0.05, 0.0, 0.01);
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_sigma);
  }
}

TEST_CASE("fit_loadings recovers exact linear structure") {
  auto factors = make_factors(40);
  Eigen::VectorXd betas(kNumFactors);
  betas << 1.1, -0.4, 0.25, 0.0, 0.7;
  auto returns = exact_returns(factors, 0.002, betas);

  auto fit = fit_loadings("X", returns, factors);
  CHECK(fit.asset_id == "X");
  CHECK(fit.n_obs == 40);
  CHECK(fit.alpha == doctest::Approx(0.002).epsilon(1e-12));
  for (int j = 0; j < kNumFactors; ++j) {
    CHECK(fit.betas(j) == doctest::Approx(betas(j)).epsilon(1e-10));
  }
  CHECK(fit.resid_variance == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("fit_loadings uses the date intersection") {
  auto factors = make_factors(30);
  Eigen::VectorXd betas = Eigen::VectorXd::Constant(kNumFactors, 0.5);
  auto returns = exact_returns(factors, 0.001, betas);
  returns.erase(returns.begin(), returns.begin() + 5);  // asset history starts later
  returns.push_back({"2010-01-31", 123.0});             // date unknown to the factors

  auto fit = fit_loadings("X", returns, factors);
  CHECK(fit.n_obs == 25);
  CHECK(fit.alpha == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("fit_loadings needs at least seven common dates") {
  auto factors = make_factors(10);
  Eigen::VectorXd betas = Eigen::VectorXd::Zero(kNumFactors);
  auto returns = exact_returns(factors, 0.0, betas);

  returns.resize(6);
  try {
    fit_loadings("X", returns, factors);
    FAIL("expected insufficient_data");
  } catch (const Error& e) {
    CHECK(e.code() == errc::insufficient_data);
  }

  auto seven = exact_returns(factors, 0.0, betas);
  seven.resize(7);
  CHECK_NOTHROW(fit_loadings("X", seven, factors));
}

TEST_CASE("fit_loadings rejects a degenerate factor sample") {
  FactorSeries flat;
  for (int t = 0; t < 12; ++t) {
    FactorObservation obs;
    char date[16];
    std::snprintf(date, sizeof date, "1990-%02d-28", t + 1);
    obs.date = date;
    obs.f = {0.01, 0.002, 0.003, 0.004, 0.005};  // identical every period
    obs.rf = 0.0;
    flat.observations.push_back(obs);
  }
  std::vector<DatedValue> returns;
  for (const auto& obs : flat.observations) returns.push_back({obs.date, 0.01});
  try {
    fit_loadings("X", returns, flat);
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == errc::rank_deficient);
  }
}

TEST_CASE("estimate_moments matches a direct computation") {
  auto factors = make_factors(36, 9);
  const int n = 36;

  std::vector<FactorLoadings> loadings(2);
  loadings[0].asset_id = "A";
  loadings[0].alpha = 0.001;
  loadings[0].betas << 1.0, 0.2, -0.1, 0.05, 0.0;
  loadings[0].resid_variance = 2e-4;
  loadings[0].n_obs = n;
  loadings[1].asset_id = "B";
  loadings[1].alpha = -0.0005;
  loadings[1].betas << 0.8, -0.3, 0.4, 0.0, 0.15;
  loadings[1].resid_variance = 5e-4;
  loadings[1].n_obs = n;

  auto moments = estimate_moments(loadings, factors);
  REQUIRE(moments.asset_ids.size() == 2);
  CHECK(moments.asset_ids[0] == "A");

  // Recompute from the raw sample with plain matrix algebra.
  Eigen::MatrixXd F(n, kNumFactors);
  double rf_sum = 0.0;
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < kNumFactors; ++j) {
      F(t, j) = factors.observations[static_cast<std::size_t>(t)].f[static_cast<std::size_t>(j)];
    }
    rf_sum += factors.observations[static_cast<std::size_t>(t)].rf;
  }
  Eigen::VectorXd fbar = F.colwise().mean();
  Eigen::MatrixXd centered = F.rowwise() - fbar.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
  double rf_mean = rf_sum / n;

  Eigen::MatrixXd B(2, kNumFactors);
  B.row(0) = loadings[0].betas.transpose();
  B.row(1) = loadings[1].betas.transpose();
  Eigen::VectorXd mu_expected(2);
  mu_expected(0) = rf_mean + loadings[0].alpha + loadings[0].betas.dot(fbar);
  mu_expected(1) = rf_mean + loadings[1].alpha + loadings[1].betas.dot(fbar);
  Eigen::MatrixXd sigma_expected = B * cov * B.transpose();
  sigma_expected(0, 0) += 2e-4;
  sigma_expected(1, 1) += 5e-4;

  CHECK(moments.rf == doctest::Approx(rf_mean).epsilon(1e-15));
  for (int i = 0; i < 2; ++i) {
    CHECK(moments.mu(i) == doctest::Approx(mu_expected(i)).epsilon(1e-13));
    for (int j = 0; j < 2; ++j) {
      CHECK(moments.sigma(i, j) == doctest::Approx(sigma_expected(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("portfolio_moments evaluates weights against the universe") {
  MarketMoments moments;
  moments.asset_ids = {"A", "B"};
  moments.mu = Eigen::VectorXd(2);
  moments.mu << 0.05, 0.10;
  moments.sigma = Eigen::MatrixXd(2, 2);
  moments.sigma << 0.04, 0.0, 0.0, 0.09;
  moments.rf = 0.02;

  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  auto p = portfolio_moments(w, moments);
  CHECK(p.mu_obs == doctest::Approx(0.075).epsilon(1e-15));
  CHECK(p.sigma_obs == doctest::Approx(std::sqrt(0.0325)).epsilon(1e-15));
  CHECK(p.lambda_obs == doctest::Approx(0.055 / std::sqrt(0.0325)).epsilon(1e-14));

  Eigen::VectorXd bad(2);
  bad << 0.7, 0.2;
  try {
    portfolio_moments(bad, moments);
    FAIL("expected weights_not_normalized");
  } catch (const Error& e) {
    CHECK(e.code() == errc::weights_not_normalized);
  }

  Eigen::VectorXd wrong_size(3);
  wrong_size << 0.5, 0.25, 0.25;
  try {
    portfolio_moments(wrong_size, moments);
    FAIL("expected dimension_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dimension_mismatch);
  }
}
