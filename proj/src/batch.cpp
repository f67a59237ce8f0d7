#include "cmlm/batch.hpp"

#include <cstdlib>
#include <limits>

#include "cmlm/errors.hpp"
#include "cmlm/inference.hpp"

namespace cmlm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FitOutcome fit_one(const std::string& asset_id, const std::vector<DatedValue>& series,
                   const FactorSeries& window) {
  FitOutcome out;
  out.asset_id = asset_id;
  try {
    out.loadings = fit_loadings(asset_id, series, window);
    out.ok = true;
  } catch (const Error& e) {
    if (e.code() == errc::insufficient_data) {
      out.skipped = true;
    } else {
      out.message = e.what();
    }
  }
  return out;
}

ProfileRow profile_one(const AccountMonthPortfolio& portfolio,
                       const std::map<std::string, PreparedSnapshot>& snapshots) {
  ProfileRow row;
  row.account_id = portfolio.account_id;
  row.month = portfolio.month;
  row.mu_obs = row.sigma_obs = row.sharpe = row.theta = row.w_star = row.efficiency = kNaN;
  row.n_stocks = static_cast<int>(portfolio.weights.size());

  auto snap_it = snapshots.find(portfolio.month);
  if (snap_it == snapshots.end()) {
    row.status = "insufficient_history";
    return row;
  }
  const PreparedSnapshot& prep = snap_it->second;
  if (!prep.cml_ok) {
    row.status = prep.cml_status;
    return row;
  }

  Eigen::VectorXd weights =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prep.snapshot.moments.asset_ids.size()));
  for (const auto& [asset, w] : portfolio.weights) {
    auto it = prep.asset_index.find(asset);
    if (it == prep.asset_index.end()) {
      row.status = "unknown_asset";
      return row;
    }
    weights(it->second) = w;
  }

  try {
    PortfolioPoint point = portfolio_moments(weights, prep.snapshot.moments);
    RiskProfile profile = profile_portfolio(point, prep.cml);
    row.mu_obs = point.mu_obs;
    row.sigma_obs = point.sigma_obs;
    row.sharpe = point.lambda_obs;
    row.theta = profile.theta;
    row.w_star = profile.w_star;
    row.efficiency = profile.efficiency;
    row.status = "ok";
  } catch (const Error& e) {
    row.status = errc_name(e.code());
  }
  return row;
}

}  // namespace

int thread_cap() {
  const char* env = std::getenv("CMLM_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 0) return 0;
  return static_cast<int>(v);
}

std::vector<FitOutcome> fit_universe(
    const std::vector<std::pair<std::string, const std::vector<DatedValue>*>>& assets,
    const FactorSeries& window, bool parallel) {
  std::vector<FitOutcome> outcomes(assets.size());
  auto body = [&](std::size_t i) {
    outcomes[i] = fit_one(assets[i].first, *assets[i].second, window);
  };
#ifdef _OPENMP
  if (parallel) {
    const int cap = thread_cap();
    const auto n = static_cast<std::ptrdiff_t>(assets.size());
    if (cap > 0) {
#pragma omp parallel for schedule(static) num_threads(cap)
      for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    }
    return outcomes;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < assets.size(); ++i) body(i);
  return outcomes;
}

PreparedSnapshot prepare_snapshot(MomentsSnapshot snapshot) {
  PreparedSnapshot prep;
  prep.snapshot = std::move(snapshot);
  for (std::size_t i = 0; i < prep.snapshot.moments.asset_ids.size(); ++i) {
    prep.asset_index[prep.snapshot.moments.asset_ids[i]] = static_cast<Eigen::Index>(i);
  }
  try {
    const MarketMoments market =
        prep.snapshot.market_ids.empty()
            ? prep.snapshot.moments
            : subset_moments(prep.snapshot.moments, prep.snapshot.market_ids);
    FrontierSolver solver(market);
    prep.cml = solver.tangency(market.rf).first;
    prep.cml_ok = true;
  } catch (const Error& e) {
    prep.cml_status = errc_name(e.code());
  }
  return prep;
}

std::vector<ProfileRow> profile_points(const std::vector<AccountMonthPortfolio>& portfolios,
                                       const std::map<std::string, PreparedSnapshot>& snapshots,
                                       bool parallel) {
  std::vector<ProfileRow> rows(portfolios.size());
  auto body = [&](std::size_t i) { rows[i] = profile_one(portfolios[i], snapshots); };
#ifdef _OPENMP
  if (parallel) {
    const int cap = thread_cap();
    const auto n = static_cast<std::ptrdiff_t>(portfolios.size());
    if (cap > 0) {
#pragma omp parallel for schedule(static) num_threads(cap)
      for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    }
    return rows;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < portfolios.size(); ++i) body(i);
  return rows;
}

}  // namespace cmlm
