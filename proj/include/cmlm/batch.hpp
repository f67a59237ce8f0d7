#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmlm/factor_model.hpp"
#include "cmlm/frontier.hpp"
#include "cmlm/ingest.hpp"
#include "cmlm/moments_io.hpp"

namespace cmlm {

/// Worker cap from the CMLM_THREADS environment variable; 0 means "let
/// the runtime decide". Non-numeric or negative values are treated as 0.
int thread_cap();

/// Per-asset regression outcome inside a batch fit. An asset with too few
/// observations in the window is skipped (it simply isn't estimable that
/// month); any other failure is recorded for the caller to surface.
struct FitOutcome {
  std::string asset_id;
  bool ok = false;
  bool skipped = false;
  FactorLoadings loadings;
  std::string message;
};

/// Fits every asset against the same factor window. Asset order in the
/// result matches input order; outputs are bitwise-identical whether run
/// serially or in parallel (each fit is independent).
std::vector<FitOutcome> fit_universe(
    const std::vector<std::pair<std::string, const std::vector<DatedValue>*>>& assets,
    const FactorSeries& window, bool parallel = true);

/// A snapshot with its line solved once up front, ready to score many
/// portfolios. When the line cannot be constructed the reason is kept so
/// each scored row can carry it.
struct PreparedSnapshot {
  MomentsSnapshot snapshot;
  std::map<std::string, Eigen::Index> asset_index;
  bool cml_ok = false;
  CapitalMarketLine cml;
  std::string cml_status;  // error name when !cml_ok
};

PreparedSnapshot prepare_snapshot(MomentsSnapshot snapshot);

/// One scored account-month. Numeric fields are meaningful only when
/// status == "ok".
struct ProfileRow {
  std::string account_id;
  std::string month;
  double mu_obs = 0.0;
  double sigma_obs = 0.0;
  double sharpe = 0.0;
  double theta = 0.0;
  double w_star = 0.0;
  double efficiency = 0.0;
  int n_stocks = 0;
  std::string status;
};

/// Scores every portfolio against its month's snapshot. Row order matches
/// input order; a missing month maps to status "insufficient_history",
/// a held asset absent from the snapshot to "unknown_asset", and typed
/// computation failures to their error names. Never throws per-row.
std::vector<ProfileRow> profile_points(const std::vector<AccountMonthPortfolio>& portfolios,
                                       const std::map<std::string, PreparedSnapshot>& snapshots,
                                       bool parallel = true);

}  // namespace cmlm
