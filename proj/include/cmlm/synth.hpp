#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmlm/factor_model.hpp"
#include "cmlm/frontier.hpp"
#include "cmlm/ingest.hpp"

namespace cmlm {

/// Knobs for the seeded synthetic-cohort generator. Everything downstream
/// of a config is a pure function of it — two runs with equal configs
/// produce byte-identical datasets.
struct SynthConfig {
  std::uint64_t seed = 42;
  int n_assets = 5;
  int n_households = 100;
  int n_months = 48;
  int window = 36;  // estimation window replicated when planting portfolios
  Eigen::VectorXd factor_mean;  // 5
  Eigen::MatrixXd factor_cov;   // 5x5, positive definite
  double rf_level = 0.0005;
  double noise_sd = 0.0;
  double theta_lo = 1.0;
  double theta_hi = 10.0;
  double fraction_on_cml = 1.0;
};

SynthConfig default_synth_config();

/// Flat key=value file; unknown keys and malformed values are rejected.
/// Keys mirror the struct fields; vectors/matrices are comma-separated
/// (factor_cov row-major, 25 values; planted_theta_range as "lo,hi").
SynthConfig load_synth_config(const std::string& path);

void validate(const SynthConfig& config);

/// Factor history plus a market universe generated exactly from the
/// five-factor return equation with the drawn loadings.
struct SynthMarket {
  std::vector<std::string> months;  // YYYY-MM, ascending
  FactorSeries factors;             // one observation per month, end-of-month dated
  std::vector<DatedValue> vix;      // one level per month, end-of-month dated
  std::vector<FactorLoadings> true_loadings;  // resid_variance = noise_sd^2
  std::map<std::string, std::vector<DatedValue>> returns;
};

SynthMarket generate_market(const SynthConfig& config);

/// Single-snapshot cohort against a given line: on-line households hold a
/// convex mix of two perfectly correlated line instruments placed at
/// their optimum; the rest hold random long-only mixes of off-line
/// assets. `universe` carries the moments needed to score them.
struct SynthHouseholds {
  std::string month;
  MarketMoments universe;
  std::vector<HouseholdProfile> profiles;
  std::vector<AccountMonthPortfolio> portfolios;
  std::vector<char> on_cml;  // aligned with profiles
  std::map<std::string, double> theta_true;
};

SynthHouseholds generate_households(const SynthConfig& config, const CapitalMarketLine& cml);

/// Full pipeline-ready dataset: a market history plus positions for every
/// month that has a complete estimation window. On-line households hold
/// per-month engineered instrument pairs whose estimated moments land
/// exactly on that month's estimated line, so the planted risk aversion
/// survives re-estimation from the written files.
struct SynthDataset {
  SynthMarket market;  // returns include the engineered per-month instruments
  std::vector<std::string> scored_months;
  std::map<std::string, CapitalMarketLine> cml_by_month;
  std::vector<HouseholdProfile> profiles;
  std::vector<char> on_cml;  // aligned with profiles
  std::vector<PositionRecord> positions;
  std::map<std::string, double> theta_true;
};

SynthDataset generate_dataset(const SynthConfig& config);

/// Writes factors.csv, returns.csv, vix.csv, positions.csv, profiles.csv,
/// and theta_true.csv (household_id,theta_true) into `dir`.
void write_dataset(const std::string& dir, const SynthDataset& dataset);

}  // namespace cmlm
