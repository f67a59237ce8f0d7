#include "cmlm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cmlm/csv.hpp"
#include "cmlm/dates.hpp"
#include "cmlm/errors.hpp"
#include "cmlm/rng.hpp"

namespace cmlm {

using csv::format_decimal;
using csv::parse_decimal;
using csv::parse_integer;
using dates::end_of_month;
using dates::month_from_index;
using dates::month_index;

namespace {

constexpr const char* kBaseMonth = "1990-01";

// Disjoint stream ids keep every drawn quantity independent of the order
// in which other quantities are generated.
constexpr std::uint64_t kStreamFactors = 1;
constexpr std::uint64_t kStreamVix = 2;
constexpr std::uint64_t kStreamAssetParams = 3;
constexpr std::uint64_t kStreamAssetNoise = 4;
constexpr std::uint64_t kStreamHouseholdTheta = 5;
constexpr std::uint64_t kStreamHouseholdProfile = 6;
constexpr std::uint64_t kStreamHouseholdWeights = 7;
constexpr std::uint64_t kStreamOffLineAssets = 8;

std::uint64_t stream_id(std::uint64_t kind, std::uint64_t index) {
  return (kind << 32) | index;
}

// Household category frequencies used as sampling weights.
const double kNetWorthCounts[6] = {23817, 2158, 1237, 1442, 4752, 3702};
const double kIncomeCounts[5] = {23395, 3945, 2798, 3085, 3885};
const double kKnowledgeCounts[5] = {3103, 11188, 7373, 2087, 13357};
const double kAgeCounts[7] = {52, 1843, 8822, 10289, 6746, 5521, 3835};
const double kChildrenCounts[7] = {26154, 6236, 3525, 966, 208, 17, 2};
const double kMaritalCounts[5] = {23834, 6165, 1146, 1792, 4171};
const double kResidenceCounts[16] = {1715, 3512, 3272, 2816, 2423, 2470, 2095, 2100,
                                     1909, 1688, 1203, 984,  868,  633,  766,  8654};
const double kCarsCounts[4] = {18199, 10778, 5748, 2383};
const double kCreditCardCounts[7] = {1193, 3006, 6240, 11693, 12983, 1958, 35};
const double kAccountTypeCounts[5] = {12618, 18734, 478, 5462, 16849};
const double kSegmentCounts[3] = {6450, 10325, 37366};

template <std::size_t N>
int draw_category(CounterRng& rng, const double (&counts)[N]) {
  double total = 0.0;
  for (double c : counts) total += c;
  const double u = rng.next_double() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    cum += counts[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(N - 1);
}

std::string household_label(int h) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "H%06d", h + 1);
  return buf;
}

std::string market_asset_label(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "MKT%03d", i + 1);
  return buf;
}

std::string offline_asset_label(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "OFF%03d", i + 1);
  return buf;
}

HouseholdProfile sample_profile(const std::string& household_id, CounterRng& rng) {
  HouseholdProfile p;
  p.household_id = household_id;
  p.net_worth_band = 1 + draw_category(rng, kNetWorthCounts);
  p.income_band = 1 + draw_category(rng, kIncomeCounts);
  p.knowledge = static_cast<Knowledge>(draw_category(rng, kKnowledgeCounts));
  p.age_band = 1 + draw_category(rng, kAgeCounts);
  p.n_children = draw_category(rng, kChildrenCounts);
  p.marital = static_cast<Marital>(draw_category(rng, kMaritalCounts));
  p.residence_years = draw_category(rng, kResidenceCounts);
  p.n_cars = draw_category(rng, kCarsCounts);
  p.n_credit_cards = draw_category(rng, kCreditCardCounts);
  p.account_type = static_cast<AccountType>(draw_category(rng, kAccountTypeCounts));
  p.segment = static_cast<Segment>(draw_category(rng, kSegmentCounts));
  return p;
}

// Uniform Dirichlet(1,...,1) over a random subset of `universe`; returns
// asset -> weight with weights summing to 1.
std::map<std::string, double> draw_long_only_mix(CounterRng& rng,
                                                 const std::vector<std::string>& universe) {
  const std::size_t max_pick = std::min<std::size_t>(universe.size(), 10);
  const std::size_t count = 1 + static_cast<std::size_t>(rng.next_index(max_pick));
  std::vector<std::size_t> order(universe.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {  // partial Fisher-Yates
    std::size_t j = i + static_cast<std::size_t>(rng.next_index(order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<double> raw(count);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    raw[i] = rng.next_exponential();
    total += raw[i];
  }
  std::map<std::string, double> weights;
  for (std::size_t i = 0; i < count; ++i) {
    weights[universe[order[i]]] = raw[i] / total;
  }
  return weights;
}

std::vector<std::string> month_range(int n_months) {
  std::vector<std::string> months;
  months.reserve(static_cast<std::size_t>(n_months));
  const long base = month_index(kBaseMonth);
  for (int m = 0; m < n_months; ++m) months.push_back(month_from_index(base + m));
  return months;
}

double parse_config_decimal(const std::string& text, const std::string& key) {
  try {
    return parse_decimal(text, 0);
  } catch (const Error&) {
    fail(errc::invalid_config, "bad decimal for '" + key + "': '" + text + "'");
  }
}

long parse_config_integer(const std::string& text, const std::string& key) {
  try {
    return parse_integer(text, 0);
  } catch (const Error&) {
    fail(errc::invalid_config, "bad integer for '" + key + "': '" + text + "'");
  }
}

std::vector<double> parse_config_vector(const std::string& text, const std::string& key,
                                        std::size_t n) {
  std::vector<std::string> parts = csv::split(text);
  if (parts.size() != n) {
    fail(errc::invalid_config, "'" + key + "' needs " + std::to_string(n) + " values, has " +
                                   std::to_string(parts.size()));
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = parse_config_decimal(parts[i], key);
  return values;
}

}  // namespace

SynthConfig default_synth_config() {
  SynthConfig config;
  config.factor_mean.resize(kNumFactors);
  // every factor premium sits well clear of its sampling noise at 36-month
  // windows, so estimated minimum-variance returns stay above the risk-free
  // level and the tangency portfolio exists for (nearly) every window
  config.factor_mean << 0.012, 0.006, 0.006, 0.006, 0.006;
  config.factor_cov = Eigen::MatrixXd::Zero(kNumFactors, kNumFactors);
  config.factor_cov.diagonal() << 0.0003, 0.0001, 0.0001, 0.0001, 0.0001;
  return config;
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  SynthConfig config = default_synth_config();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(errc::invalid_config,
           "expected key=value at line " + std::to_string(line_no) + ": '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_config_integer(value, key));
    } else if (key == "n_assets") {
      config.n_assets = static_cast<int>(parse_config_integer(value, key));
    } else if (key == "n_households") {
      config.n_households = static_cast<int>(parse_config_integer(value, key));
    } else if (key == "n_months") {
      config.n_months = static_cast<int>(parse_config_integer(value, key));
    } else if (key == "window") {
      config.window = static_cast<int>(parse_config_integer(value, key));
    } else if (key == "factor_mean") {
      std::vector<double> v = parse_config_vector(value, key, kNumFactors);
      for (int i = 0; i < kNumFactors; ++i) config.factor_mean(i) = v[static_cast<std::size_t>(i)];
    } else if (key == "factor_cov") {
      std::vector<double> v = parse_config_vector(value, key, kNumFactors * kNumFactors);
      for (int i = 0; i < kNumFactors; ++i) {
        for (int j = 0; j < kNumFactors; ++j) {
          config.factor_cov(i, j) = v[static_cast<std::size_t>(i * kNumFactors + j)];
        }
      }
    } else if (key == "rf_level") {
      config.rf_level = parse_config_decimal(value, key);
    } else if (key == "noise_sd") {
      config.noise_sd = parse_config_decimal(value, key);
    } else if (key == "planted_theta_range") {
      std::vector<double> v = parse_config_vector(value, key, 2);
      config.theta_lo = v[0];
      config.theta_hi = v[1];
    } else if (key == "fraction_on_cml") {
      config.fraction_on_cml = parse_config_decimal(value, key);
    } else {
      fail(errc::invalid_config, "unknown config key '" + key + "'");
    }
  }
  validate(config);
  return config;
}

void validate(const SynthConfig& config) {
  if (config.n_assets < 1) fail(errc::invalid_config, "n_assets must be >= 1");
  if (config.n_households < 0) fail(errc::invalid_config, "n_households must be >= 0");
  if (config.n_months < 1) fail(errc::invalid_config, "n_months must be >= 1");
  if (config.window < 7) fail(errc::invalid_config, "window must be >= 7");
  if (config.factor_mean.size() != kNumFactors) {
    fail(errc::invalid_config, "factor_mean must have 5 entries");
  }
  if (config.factor_cov.rows() != kNumFactors || config.factor_cov.cols() != kNumFactors) {
    fail(errc::invalid_config, "factor_cov must be 5x5");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(config.factor_cov);
  if (llt.info() != Eigen::Success) {
    fail(errc::invalid_config, "factor_cov is not positive definite");
  }
  if (!(config.noise_sd >= 0.0)) fail(errc::invalid_config, "noise_sd must be >= 0");
  if (!(config.theta_lo > 0.0) || !(config.theta_lo <= config.theta_hi)) {
    fail(errc::invalid_config, "planted_theta_range needs 0 < lo <= hi");
  }
  if (!(config.fraction_on_cml >= 0.0) || !(config.fraction_on_cml <= 1.0)) {
    fail(errc::invalid_config, "fraction_on_cml must be in [0, 1]");
  }
  if (config.noise_sd == 0.0 && config.n_assets > kNumFactors) {
    fail(errc::invalid_config,
         "noise_sd=0 with more than 5 assets makes the asset covariance singular; "
         "raise noise_sd or lower n_assets");
  }
}

SynthMarket generate_market(const SynthConfig& config) {
  validate(config);
  SynthMarket market;
  market.months = month_range(config.n_months);

  Eigen::LLT<Eigen::MatrixXd> llt(config.factor_cov);
  Eigen::MatrixXd chol = llt.matrixL();

  CounterRng factor_rng(config.seed, stream_id(kStreamFactors, 0));
  market.factors.observations.reserve(market.months.size());
  for (const auto& month : market.months) {
    Eigen::VectorXd z(kNumFactors);
    for (int j = 0; j < kNumFactors; ++j) z(j) = factor_rng.next_normal();
    Eigen::VectorXd f = config.factor_mean + chol * z;
    FactorObservation obs;
    obs.date = end_of_month(month);
    for (int j = 0; j < kNumFactors; ++j) obs.f[static_cast<std::size_t>(j)] = f(j);
    obs.rf = config.rf_level;
    market.factors.observations.push_back(std::move(obs));
  }

  CounterRng vix_rng(config.seed, stream_id(kStreamVix, 0));
  market.vix.reserve(market.months.size());
  for (const auto& month : market.months) {
    const double z = vix_rng.next_normal();
    market.vix.push_back(DatedValue{end_of_month(month), 20.0 * std::exp(0.3 * z - 0.045)});
  }

  for (int i = 0; i < config.n_assets; ++i) {
    const std::string id = market_asset_label(i);
    CounterRng param_rng(config.seed, stream_id(kStreamAssetParams, static_cast<std::uint64_t>(i)));
    FactorLoadings truth;
    truth.asset_id = id;
    // each asset loads mainly on one factor (rotating across assets) with
    // small side exposures, so no factor can be hedged away cheaply and the
    // estimated minimum-variance return stays above the risk-free rate even
    // when idiosyncratic noise is zero
    truth.alpha = param_rng.next_uniform(0.0, 0.0008);
    truth.betas.resize(kNumFactors);
    const int dominant = i % kNumFactors;
    truth.betas(dominant) = param_rng.next_uniform(0.8, 1.2);
    for (int j = 0; j < kNumFactors; ++j) {
      if (j != dominant) truth.betas(j) = param_rng.next_uniform(-0.2, 0.2);
    }
    truth.resid_variance = config.noise_sd * config.noise_sd;
    truth.n_obs = market.months.size();

    CounterRng noise_rng(config.seed, stream_id(kStreamAssetNoise, static_cast<std::uint64_t>(i)));
    std::vector<DatedValue> series;
    series.reserve(market.months.size());
    for (const auto& obs : market.factors.observations) {
      double r = obs.rf + truth.alpha;
      for (int j = 0; j < kNumFactors; ++j) {
        r += truth.betas(j) * obs.f[static_cast<std::size_t>(j)];
      }
      if (config.noise_sd > 0.0) r += config.noise_sd * noise_rng.next_normal();
      series.push_back(DatedValue{obs.date, r});
    }
    market.returns.emplace(id, std::move(series));
    market.true_loadings.push_back(std::move(truth));
  }
  return market;
}

SynthHouseholds generate_households(const SynthConfig& config, const CapitalMarketLine& cml) {
  validate(config);
  SynthHouseholds out;
  out.month = month_range(config.n_months).back();

  const double lambda = cml.lambda_mkt;
  const double sigma_lo = 0.5 * lambda / config.theta_hi;
  const double sigma_hi = 2.0 * lambda / config.theta_lo;

  // Universe: two perfectly correlated on-line instruments bracketing
  // every planted optimum, plus independent strictly-off-line assets.
  const int n_off = static_cast<int>(std::min(config.n_assets, 10));
  out.universe.rf = cml.rf;
  out.universe.asset_ids = {"CML_LO", "CML_HI"};
  for (int i = 0; i < n_off; ++i) out.universe.asset_ids.push_back(offline_asset_label(i));
  const auto p = static_cast<Eigen::Index>(out.universe.asset_ids.size());
  out.universe.mu.resize(p);
  out.universe.sigma = Eigen::MatrixXd::Zero(p, p);
  out.universe.mu(0) = cml.rf + lambda * sigma_lo;
  out.universe.mu(1) = cml.rf + lambda * sigma_hi;
  out.universe.sigma(0, 0) = sigma_lo * sigma_lo;
  out.universe.sigma(0, 1) = sigma_lo * sigma_hi;
  out.universe.sigma(1, 0) = sigma_lo * sigma_hi;
  out.universe.sigma(1, 1) = sigma_hi * sigma_hi;
  CounterRng off_rng(config.seed, stream_id(kStreamOffLineAssets, 0));
  for (int i = 0; i < n_off; ++i) {
    const double sigma = off_rng.next_uniform(sigma_lo, sigma_hi);
    const double sharpe_shrink = off_rng.next_uniform(0.3, 0.9);
    out.universe.mu(2 + i) = cml.rf + sharpe_shrink * lambda * sigma;
    out.universe.sigma(2 + i, 2 + i) = sigma * sigma;
  }
  std::vector<std::string> off_ids(out.universe.asset_ids.begin() + 2,
                                   out.universe.asset_ids.end());

  const long n_on = std::lround(config.fraction_on_cml * config.n_households);
  for (int h = 0; h < config.n_households; ++h) {
    const std::string id = household_label(h);
    CounterRng theta_rng(config.seed, stream_id(kStreamHouseholdTheta, static_cast<std::uint64_t>(h)));
    CounterRng profile_rng(config.seed,
                           stream_id(kStreamHouseholdProfile, static_cast<std::uint64_t>(h)));
    CounterRng weight_rng(config.seed,
                          stream_id(kStreamHouseholdWeights, static_cast<std::uint64_t>(h)));
    const double theta = theta_rng.next_uniform(config.theta_lo, config.theta_hi);
    out.profiles.push_back(sample_profile(id, profile_rng));
    out.theta_true[id] = theta;

    AccountMonthPortfolio port;
    port.account_id = id;
    port.month = out.month;
    const bool on = h < n_on;
    out.on_cml.push_back(on ? 1 : 0);
    if (on) {
      // Optimum sits at sigma* = lambda/theta; mixing the two line
      // instruments linearly in sigma lands exactly there.
      const double sigma_star = lambda / theta;
      const double w_lo = (sigma_hi - sigma_star) / (sigma_hi - sigma_lo);
      port.weights = {{"CML_LO", w_lo}, {"CML_HI", 1.0 - w_lo}};
    } else {
      port.weights = draw_long_only_mix(weight_rng, off_ids);
    }
    out.portfolios.push_back(std::move(port));
  }
  return out;
}

SynthDataset generate_dataset(const SynthConfig& config) {
  validate(config);
  if (config.n_months <= config.window) {
    fail(errc::invalid_config, "n_months must exceed window to leave a scorable month");
  }
  SynthDataset dataset;
  dataset.market = generate_market(config);

  std::vector<std::string> market_ids;
  for (const auto& truth : dataset.market.true_loadings) market_ids.push_back(truth.asset_id);

  // Per scored month: replicate the estimation the pipeline will run on
  // the written files, then engineer a perfectly correlated instrument
  // pair whose re-estimated moments land exactly on that month's line.
  struct MonthAnchors {
    CapitalMarketLine cml;
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
  };
  std::map<std::string, MonthAnchors> anchors_by_month;
  for (int m = config.window; m < config.n_months; ++m) {
    const std::string& month = dataset.market.months[static_cast<std::size_t>(m)];
    FactorSeries window_factors =
        rolling_window(dataset.market.factors, month, static_cast<std::size_t>(config.window));
    std::vector<FactorLoadings> fits;
    fits.reserve(market_ids.size());
    for (const auto& id : market_ids) {
      fits.push_back(fit_loadings(id, dataset.market.returns.at(id), window_factors));
    }
    MarketMoments moments = estimate_moments(fits, window_factors);
    FrontierSolver solver(moments);
    auto [cml, tangency_weights] = solver.tangency(moments.rf);
    (void)tangency_weights;

    MonthAnchors anchors;
    anchors.cml = cml;
    anchors.sigma_lo = 0.5 * cml.lambda_mkt / config.theta_hi;
    anchors.sigma_hi = 2.0 * cml.lambda_mkt / config.theta_lo;

    // Window sample stats of the first factor drive the engineered pair:
    // excess return a + b*f1 estimates to mean a + b*fbar1 and standard
    // deviation |b|*sqrt(c11) under the same window.
    const auto n = static_cast<double>(window_factors.observations.size());
    double rf_mean = 0.0, f1_mean = 0.0;
    for (const auto& obs : window_factors.observations) {
      rf_mean += obs.rf;
      f1_mean += obs.f[0];
    }
    rf_mean /= n;
    f1_mean /= n;
    double c11 = 0.0;
    for (const auto& obs : window_factors.observations) {
      c11 += (obs.f[0] - f1_mean) * (obs.f[0] - f1_mean);
    }
    c11 /= n - 1.0;

    const std::string ids[2] = {"CMLA_" + month, "CMLB_" + month};
    const double sigmas[2] = {anchors.sigma_lo, anchors.sigma_hi};
    for (int k = 0; k < 2; ++k) {
      const double b = sigmas[k] / std::sqrt(c11);
      const double mu_target = cml.rf + cml.lambda_mkt * sigmas[k];
      const double a = mu_target - rf_mean - b * f1_mean;
      std::vector<DatedValue> series;
      series.reserve(window_factors.observations.size());
      for (const auto& obs : window_factors.observations) {
        series.push_back(DatedValue{obs.date, obs.rf + a + b * obs.f[0]});
      }
      dataset.market.returns.emplace(ids[k], std::move(series));
    }

    dataset.scored_months.push_back(month);
    dataset.cml_by_month.emplace(month, cml);
    anchors_by_month.emplace(month, anchors);
  }

  const long n_on = std::lround(config.fraction_on_cml * config.n_households);
  for (int h = 0; h < config.n_households; ++h) {
    const std::string id = household_label(h);
    CounterRng theta_rng(config.seed, stream_id(kStreamHouseholdTheta, static_cast<std::uint64_t>(h)));
    CounterRng profile_rng(config.seed,
                           stream_id(kStreamHouseholdProfile, static_cast<std::uint64_t>(h)));
    CounterRng weight_rng(config.seed,
                          stream_id(kStreamHouseholdWeights, static_cast<std::uint64_t>(h)));
    const double theta = theta_rng.next_uniform(config.theta_lo, config.theta_hi);
    dataset.profiles.push_back(sample_profile(id, profile_rng));
    dataset.theta_true[id] = theta;
    const bool on = h < n_on;
    dataset.on_cml.push_back(on ? 1 : 0);

    const double total_value = weight_rng.next_uniform(1e4, 1e6);
    for (const auto& month : dataset.scored_months) {
      if (on) {
        const MonthAnchors& anchors = anchors_by_month.at(month);
        const double sigma_star = anchors.cml.lambda_mkt / theta;
        const double w_lo = (anchors.sigma_hi - sigma_star) / (anchors.sigma_hi - anchors.sigma_lo);
        dataset.positions.push_back(
            PositionRecord{id, id, month, "CMLA_" + month, w_lo * total_value});
        dataset.positions.push_back(
            PositionRecord{id, id, month, "CMLB_" + month, (1.0 - w_lo) * total_value});
      } else {
        for (const auto& [asset, w] : draw_long_only_mix(weight_rng, market_ids)) {
          dataset.positions.push_back(PositionRecord{id, id, month, asset, w * total_value});
        }
      }
    }
  }
  return dataset;
}

void write_dataset(const std::string& dir, const SynthDataset& dataset) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(errc::io_error, "cannot create directory '" + dir + "': " + ec.message());

  const std::filesystem::path base(dir);
  write_factors((base / "factors.csv").string(), dataset.market.factors);
  write_asset_returns((base / "returns.csv").string(), dataset.market.returns);
  write_vix((base / "vix.csv").string(), dataset.market.vix);
  write_positions((base / "positions.csv").string(), dataset.positions);
  write_profiles((base / "profiles.csv").string(), dataset.profiles);

  std::ofstream out(base / "theta_true.csv");
  if (!out) fail(errc::io_error, "cannot open theta_true.csv for writing");
  out << "household_id,theta_true\n";
  for (const auto& profile : dataset.profiles) {
    out << profile.household_id << ","
        << format_decimal(dataset.theta_true.at(profile.household_id)) << "\n";
  }
  if (!out) fail(errc::io_error, "failed writing theta_true.csv");
}

}  // namespace cmlm
