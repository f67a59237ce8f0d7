#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "cmlm/batch.hpp"
#include "cmlm/ingest.hpp"
#include "cmlm/moments_io.hpp"
#include "cmlm/panel.hpp"
#include "cmlm/rng.hpp"
#include "cmlm/synth.hpp"

// Times each parallel kernel against its serial reference and verifies the
// outputs match to the last bit; exits nonzero on any mismatch.

namespace {

using Clock = std::chrono::steady_clock;

bool g_all_equal = true;

template <typename F>
double best_of_ms(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    body();
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

bool bits_equal(double a, double b) {
  std::uint64_t ua = 0;
  std::uint64_t ub = 0;
  std::memcpy(&ua, &a, sizeof a);
  std::memcpy(&ub, &b, sizeof b);
  return ua == ub;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-16s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   bitwise %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, equal ? "equal" : "DIFFER");
  if (!equal) g_all_equal = false;
}

bool outcomes_equal(const std::vector<cmlm::FitOutcome>& a,
                    const std::vector<cmlm::FitOutcome>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].asset_id != b[i].asset_id || a[i].ok != b[i].ok || a[i].skipped != b[i].skipped ||
        a[i].message != b[i].message) {
      return false;
    }
    if (!a[i].ok) continue;
    if (!bits_equal(a[i].loadings.alpha, b[i].loadings.alpha) ||
        !bits_equal(a[i].loadings.resid_variance, b[i].loadings.resid_variance) ||
        a[i].loadings.n_obs != b[i].loadings.n_obs) {
      return false;
    }
    for (int k = 0; k < cmlm::kNumFactors; ++k) {
      if (!bits_equal(a[i].loadings.betas(k), b[i].loadings.betas(k))) return false;
    }
  }
  return true;
}

bool rows_equal(const std::vector<cmlm::ProfileRow>& a, const std::vector<cmlm::ProfileRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].account_id != b[i].account_id || a[i].month != b[i].month ||
        a[i].status != b[i].status || a[i].n_stocks != b[i].n_stocks) {
      return false;
    }
    if (a[i].status != "ok") continue;
    if (!bits_equal(a[i].mu_obs, b[i].mu_obs) || !bits_equal(a[i].sigma_obs, b[i].sigma_obs) ||
        !bits_equal(a[i].sharpe, b[i].sharpe) || !bits_equal(a[i].theta, b[i].theta) ||
        !bits_equal(a[i].w_star, b[i].w_star) ||
        !bits_equal(a[i].efficiency, b[i].efficiency)) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  // a cohort big enough for the loops to dominate setup cost
  cmlm::SynthConfig config = cmlm::default_synth_config();
  config.seed = 20240907;
  config.n_assets = 48;
  config.noise_sd = 0.004;  // off the exact factor plane so every asset needs a real fit
  config.n_households = 4000;
  config.n_months = 48;
  config.window = 36;
  config.fraction_on_cml = 0.5;
  const cmlm::SynthDataset dataset = cmlm::generate_dataset(config);

  std::vector<std::pair<std::string, const std::vector<cmlm::DatedValue>*>> assets;
  for (const auto& [id, series] : dataset.market.returns) assets.emplace_back(id, &series);
  const std::string last_month = dataset.scored_months.back();
  const cmlm::FactorSeries window = cmlm::rolling_window(
      dataset.market.factors, last_month, static_cast<std::size_t>(config.window));

  std::vector<cmlm::FitOutcome> fits_serial;
  std::vector<cmlm::FitOutcome> fits_parallel;
  const double fit_serial_ms =
      best_of_ms(3, [&] { fits_serial = cmlm::fit_universe(assets, window, false); });
  const double fit_parallel_ms =
      best_of_ms(3, [&] { fits_parallel = cmlm::fit_universe(assets, window, true); });
  report("fit_universe", fit_serial_ms, fit_parallel_ms,
         outcomes_equal(fits_serial, fits_parallel));

  // one prepared snapshot per scored month, then score the whole cohort
  std::map<std::string, cmlm::PreparedSnapshot> snapshots;
  for (const std::string& month : dataset.scored_months) {
    const cmlm::FactorSeries month_window = cmlm::rolling_window(
        dataset.market.factors, month, static_cast<std::size_t>(config.window));
    std::vector<cmlm::FactorLoadings> loadings;
    for (cmlm::FitOutcome& outcome : cmlm::fit_universe(assets, month_window)) {
      if (outcome.ok) loadings.push_back(std::move(outcome.loadings));
    }
    cmlm::MomentsSnapshot snap;
    snap.month = month;
    snap.moments = cmlm::estimate_moments(loadings, month_window);
    for (const std::string& id : snap.moments.asset_ids) {
      if (id.rfind("MKT", 0) == 0) snap.market_ids.push_back(id);
    }
    snapshots.emplace(month, cmlm::prepare_snapshot(std::move(snap)));
  }
  const std::vector<cmlm::AccountMonthPortfolio> portfolios =
      cmlm::build_all_weights(dataset.positions);

  std::vector<cmlm::ProfileRow> rows_serial;
  std::vector<cmlm::ProfileRow> rows_parallel;
  const double score_serial_ms =
      best_of_ms(3, [&] { rows_serial = cmlm::profile_points(portfolios, snapshots, false); });
  const double score_parallel_ms =
      best_of_ms(3, [&] { rows_parallel = cmlm::profile_points(portfolios, snapshots, true); });
  report("profile_points", score_serial_ms, score_parallel_ms,
         rows_equal(rows_serial, rows_parallel));

  // demeaning a wide panel: 200k rows x 32 columns, two-way groups
  const int n_rows = 200000;
  const int n_cols = 32;
  const int n_entities = 5000;
  const int n_times = 40;
  Eigen::MatrixXd base(n_rows, n_cols);
  cmlm::CounterRng rng(123, 1);
  for (int j = 0; j < n_cols; ++j) {
    for (int i = 0; i < n_rows; ++i) base(i, j) = rng.next_normal();
  }
  std::vector<int> entity_of(n_rows);
  std::vector<int> time_of(n_rows);
  for (int i = 0; i < n_rows; ++i) {
    entity_of[i] = i % n_entities;
    time_of[i] = (i / n_entities) % n_times;
  }
  Eigen::MatrixXd demeaned_serial;
  Eigen::MatrixXd demeaned_parallel;
  const double demean_serial_ms = best_of_ms(3, [&] {
    demeaned_serial = base;
    cmlm::within_demean(demeaned_serial, entity_of, time_of, n_entities, n_times,
                        cmlm::Effects::two_way, false);
  });
  const double demean_parallel_ms = best_of_ms(3, [&] {
    demeaned_parallel = base;
    cmlm::within_demean(demeaned_parallel, entity_of, time_of, n_entities, n_times,
                        cmlm::Effects::two_way, true);
  });
  bool demean_equal = true;
  for (int j = 0; j < n_cols && demean_equal; ++j) {
    for (int i = 0; i < n_rows; ++i) {
      if (!bits_equal(demeaned_serial(i, j), demeaned_parallel(i, j))) {
        demean_equal = false;
        break;
      }
    }
  }
  report("within_demean", demean_serial_ms, demean_parallel_ms, demean_equal);

  if (!g_all_equal) {
    std::printf("FAIL: parallel output diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
