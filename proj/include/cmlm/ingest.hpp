#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cmlm/factor_model.hpp"

namespace cmlm {

/// One end-of-month holding: an account's market value in one asset.
struct PositionRecord {
  std::string household_id;
  std::string account_id;
  std::string month;  // YYYY-MM
  std::string asset_id;
  double market_value = 0.0;
};

enum class Knowledge { extensive, good, limited, none, unknown };
enum class Marital { married, single, inferred_married, inferred_single, unknown };
enum class AccountType { cash, ira, keogh, margin, schwab_one };
enum class Segment { active_trader, affluent, general };

const char* knowledge_name(Knowledge v) noexcept;
const char* marital_name(Marital v) noexcept;
const char* account_type_name(AccountType v) noexcept;
const char* segment_name(Segment v) noexcept;

/// Time-invariant household attributes, all within fixed enumerated domains.
struct HouseholdProfile {
  std::string household_id;
  int net_worth_band = 1;   // 1..6
  int income_band = 1;      // 1..5
  Knowledge knowledge = Knowledge::unknown;
  int age_band = 1;         // 1..7
  int n_children = 0;       // 0..6
  Marital marital = Marital::unknown;
  int residence_years = 0;  // 0..15
  int n_cars = 0;           // 0..3
  int n_credit_cards = 0;   // 0..6
  AccountType account_type = AccountType::cash;
  Segment segment = Segment::general;
};

/// Value-weighted holdings snapshot for one account in one month.
struct AccountMonthPortfolio {
  std::string account_id;
  std::string month;
  std::map<std::string, double> weights;  // asset_id -> weight, sums to 1
};

/// Strict CSV loaders. Malformed rows raise errors carrying line numbers;
/// nothing is skipped silently.
std::vector<PositionRecord> load_positions(const std::string& path);

/// Rows with any empty field are dropped and counted via `dropped_missing`
/// (pass nullptr to ignore); out-of-domain values are errors, not drops.
std::vector<HouseholdProfile> load_household_profiles(const std::string& path,
                                                      std::size_t* dropped_missing = nullptr);

/// `date,vix_close` records, re-sorted ascending by date.
std::vector<DatedValue> load_vix(const std::string& path);

/// `date,mkt_rf,smb,hml,rmw,cma,rf` records, re-sorted ascending by date.
FactorSeries load_factors(const std::string& path);

/// `date,asset_id,ret` rows split into per-asset series sorted by date.
std::map<std::string, std::vector<DatedValue>> load_asset_returns(const std::string& path);

/// Turns one account-month's positions into normalized weights.
/// Zero-value positions are dropped; a zero total is an error.
AccountMonthPortfolio build_weights(const std::vector<PositionRecord>& positions);

/// Groups positions by (account_id, month), ascending, and normalizes each
/// group. The household owning each account is reported via `household_of`
/// when non-null.
std::vector<AccountMonthPortfolio> build_all_weights(
    const std::vector<PositionRecord>& positions,
    std::map<std::string, std::string>* household_of = nullptr);

/// The most recent `length` records dated strictly before the month
/// `as_of`. Fewer available is an error — windows are never short.
std::vector<DatedValue> rolling_window(const std::vector<DatedValue>& series,
                                       const std::string& as_of, std::size_t length);
FactorSeries rolling_window(const FactorSeries& series, const std::string& as_of,
                            std::size_t length);

/// Collapses a daily series to one record per month — the month's last
/// observation — re-keyed by YYYY-MM.
std::vector<DatedValue> monthly_last(const std::vector<DatedValue>& series);

/// Writers emitting the exact schemas the loaders accept, so any loaded
/// dataset round-trips to identical records.
void write_positions(const std::string& path, const std::vector<PositionRecord>& records);
void write_profiles(const std::string& path, const std::vector<HouseholdProfile>& profiles);
void write_vix(const std::string& path, const std::vector<DatedValue>& series);
void write_factors(const std::string& path, const FactorSeries& series);
void write_asset_returns(const std::string& path,
                         const std::map<std::string, std::vector<DatedValue>>& by_asset);

}  // namespace cmlm
