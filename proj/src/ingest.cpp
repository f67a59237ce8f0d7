#include "cmlm/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>
#include <utility>

#include "cmlm/csv.hpp"
#include "cmlm/dates.hpp"
#include "cmlm/errors.hpp"

namespace cmlm {

using csv::format_decimal;
using csv::parse_decimal;
using csv::parse_integer;
using dates::is_iso_date;
using dates::is_month;
using dates::month_of_date;

namespace {

const char* kPositionsHeader = "household_id,account_id,month,asset_id,market_value";
const char* kProfilesHeader =
    "household_id,net_worth_band,income_band,knowledge,age_band,n_children,marital,"
    "residence_years,n_cars,n_credit_cards,account_type,segment";
const char* kVixHeader = "date,vix_close";
const char* kFactorsHeader = "date,mkt_rf,smb,hml,rmw,cma,rf";
const char* kAssetReturnsHeader = "date,asset_id,ret";

long domain_integer(const std::string& text, long lo, long hi, const std::string& field,
                    std::size_t line) {
  long v = parse_integer(text, line);
  if (v < lo || v > hi) {
    fail(errc::out_of_domain_value, field + " must be in [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "], got " + text + " at line " +
                                        std::to_string(line));
  }
  return v;
}

template <typename Enum>
Enum domain_enum(const std::string& text, const std::vector<std::pair<const char*, Enum>>& table,
                 const std::string& field, std::size_t line) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  fail(errc::out_of_domain_value,
       "unknown " + field + " '" + text + "' at line " + std::to_string(line));
}

const std::vector<std::pair<const char*, Knowledge>>& knowledge_table() {
  static const std::vector<std::pair<const char*, Knowledge>> table = {
      {"extensive", Knowledge::extensive},
      {"good", Knowledge::good},
      {"limited", Knowledge::limited},
      {"none", Knowledge::none},
      {"unknown", Knowledge::unknown}};
  return table;
}

const std::vector<std::pair<const char*, Marital>>& marital_table() {
  static const std::vector<std::pair<const char*, Marital>> table = {
      {"married", Marital::married},
      {"single", Marital::single},
      {"inferred_married", Marital::inferred_married},
      {"inferred_single", Marital::inferred_single},
      {"unknown", Marital::unknown}};
  return table;
}

const std::vector<std::pair<const char*, AccountType>>& account_type_table() {
  static const std::vector<std::pair<const char*, AccountType>> table = {
      {"cash", AccountType::cash},
      {"ira", AccountType::ira},
      {"keogh", AccountType::keogh},
      {"margin", AccountType::margin},
      {"schwab_one", AccountType::schwab_one}};
  return table;
}

const std::vector<std::pair<const char*, Segment>>& segment_table() {
  static const std::vector<std::pair<const char*, Segment>> table = {
      {"active_trader", Segment::active_trader},
      {"affluent", Segment::affluent},
      {"general", Segment::general}};
  return table;
}

std::string require_date(const std::string& text, std::size_t line) {
  if (!is_iso_date(text)) {
    fail(errc::bad_row, "expected ISO date (YYYY-MM-DD), got '" + text + "' at line " +
                            std::to_string(line));
  }
  return text;
}

std::string require_month(const std::string& text, std::size_t line) {
  if (!is_month(text)) {
    fail(errc::bad_row,
         "expected month (YYYY-MM), got '" + text + "' at line " + std::to_string(line));
  }
  return text;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

const char* knowledge_name(Knowledge v) noexcept {
  switch (v) {
    case Knowledge::extensive: return "extensive";
    case Knowledge::good: return "good";
    case Knowledge::limited: return "limited";
    case Knowledge::none: return "none";
    case Knowledge::unknown: return "unknown";
  }
  return "unknown";
}

const char* marital_name(Marital v) noexcept {
  switch (v) {
    case Marital::married: return "married";
    case Marital::single: return "single";
    case Marital::inferred_married: return "inferred_married";
    case Marital::inferred_single: return "inferred_single";
    case Marital::unknown: return "unknown";
  }
  return "unknown";
}

const char* account_type_name(AccountType v) noexcept {
  switch (v) {
    case AccountType::cash: return "cash";
    case AccountType::ira: return "ira";
    case AccountType::keogh: return "keogh";
    case AccountType::margin: return "margin";
    case AccountType::schwab_one: return "schwab_one";
  }
  return "cash";
}

const char* segment_name(Segment v) noexcept {
  switch (v) {
    case Segment::active_trader: return "active_trader";
    case Segment::affluent: return "affluent";
    case Segment::general: return "general";
  }
  return "general";
}

std::vector<PositionRecord> load_positions(const std::string& path) {
  csv::Reader reader(path, kPositionsHeader);
  std::vector<PositionRecord> records;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> first_line;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    PositionRecord rec;
    rec.household_id = fields[0];
    rec.account_id = fields[1];
    rec.month = require_month(fields[2], line);
    rec.asset_id = fields[3];
    rec.market_value = parse_decimal(fields[4], line);
    if (rec.market_value < 0.0) {
      fail(errc::out_of_domain_value,
           "market_value must be >= 0, got " + fields[4] + " at line " + std::to_string(line));
    }
    auto key = std::make_tuple(rec.account_id, rec.month, rec.asset_id);
    auto [it, inserted] = first_line.emplace(key, line);
    if (!inserted) {
      fail(errc::duplicate_key, "position (" + rec.account_id + ", " + rec.month + ", " +
                                    rec.asset_id + ") at line " + std::to_string(line) +
                                    " repeats line " + std::to_string(it->second));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<HouseholdProfile> load_household_profiles(const std::string& path,
                                                      std::size_t* dropped_missing) {
  csv::Reader reader(path, kProfilesHeader);
  std::vector<HouseholdProfile> profiles;
  std::map<std::string, std::size_t> first_line;
  std::size_t dropped = 0;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    bool missing = false;
    for (const auto& f : fields) {
      if (f.empty()) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++dropped;
      continue;
    }
    HouseholdProfile p;
    p.household_id = fields[0];
    p.net_worth_band = static_cast<int>(domain_integer(fields[1], 1, 6, "net_worth_band", line));
    p.income_band = static_cast<int>(domain_integer(fields[2], 1, 5, "income_band", line));
    p.knowledge = domain_enum(fields[3], knowledge_table(), "knowledge", line);
    p.age_band = static_cast<int>(domain_integer(fields[4], 1, 7, "age_band", line));
    p.n_children = static_cast<int>(domain_integer(fields[5], 0, 6, "n_children", line));
    p.marital = domain_enum(fields[6], marital_table(), "marital", line);
    p.residence_years =
        static_cast<int>(domain_integer(fields[7], 0, 15, "residence_years", line));
    p.n_cars = static_cast<int>(domain_integer(fields[8], 0, 3, "n_cars", line));
    p.n_credit_cards = static_cast<int>(domain_integer(fields[9], 0, 6, "n_credit_cards", line));
    p.account_type = domain_enum(fields[10], account_type_table(), "account_type", line);
    p.segment = domain_enum(fields[11], segment_table(), "segment", line);
    auto [it, inserted] = first_line.emplace(p.household_id, line);
    if (!inserted) {
      fail(errc::duplicate_key, "household '" + p.household_id + "' at line " +
                                    std::to_string(line) + " repeats line " +
                                    std::to_string(it->second));
    }
    profiles.push_back(std::move(p));
  }
  if (dropped_missing != nullptr) *dropped_missing = dropped;
  return profiles;
}

std::vector<DatedValue> load_vix(const std::string& path) {
  csv::Reader reader(path, kVixHeader);
  std::vector<DatedValue> series;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    DatedValue rec;
    rec.date = require_date(fields[0], line);
    rec.value = parse_decimal(fields[1], line);
    series.push_back(std::move(rec));
  }
  std::sort(series.begin(), series.end(),
            [](const DatedValue& a, const DatedValue& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].date == series[i - 1].date) {
      fail(errc::bad_row, "duplicate date " + series[i].date + " in '" + path + "'");
    }
  }
  return series;
}

FactorSeries load_factors(const std::string& path) {
  csv::Reader reader(path, kFactorsHeader);
  FactorSeries series;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    FactorObservation obs;
    obs.date = require_date(fields[0], line);
    for (int j = 0; j < kNumFactors; ++j) {
      obs.f[static_cast<std::size_t>(j)] = parse_decimal(fields[static_cast<std::size_t>(j) + 1], line);
    }
    obs.rf = parse_decimal(fields[6], line);
    series.observations.push_back(std::move(obs));
  }
  std::sort(series.observations.begin(), series.observations.end(),
            [](const FactorObservation& a, const FactorObservation& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < series.observations.size(); ++i) {
    if (series.observations[i].date == series.observations[i - 1].date) {
      fail(errc::bad_row,
           "duplicate date " + series.observations[i].date + " in '" + path + "'");
    }
  }
  return series;
}

std::map<std::string, std::vector<DatedValue>> load_asset_returns(const std::string& path) {
  csv::Reader reader(path, kAssetReturnsHeader);
  std::map<std::string, std::vector<DatedValue>> by_asset;
  std::map<std::pair<std::string, std::string>, std::size_t> first_line;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    std::string date = require_date(fields[0], line);
    const std::string& asset = fields[1];
    double ret = parse_decimal(fields[2], line);
    auto [it, inserted] = first_line.emplace(std::make_pair(asset, date), line);
    if (!inserted) {
      fail(errc::duplicate_key, "return for (" + asset + ", " + date + ") at line " +
                                    std::to_string(line) + " repeats line " +
                                    std::to_string(it->second));
    }
    by_asset[asset].push_back(DatedValue{std::move(date), ret});
  }
  for (auto& [asset, series] : by_asset) {
    std::sort(series.begin(), series.end(),
              [](const DatedValue& a, const DatedValue& b) { return a.date < b.date; });
  }
  return by_asset;
}

AccountMonthPortfolio build_weights(const std::vector<PositionRecord>& positions) {
  if (positions.empty()) {
    fail(errc::empty_input, "no positions to build weights from");
  }
  AccountMonthPortfolio out;
  out.account_id = positions.front().account_id;
  out.month = positions.front().month;
  double total = 0.0;
  for (const auto& p : positions) {
    if (p.account_id != out.account_id || p.month != out.month) {
      fail(errc::invalid_argument, "positions span more than one account-month: (" +
                                       out.account_id + ", " + out.month + ") vs (" +
                                       p.account_id + ", " + p.month + ")");
    }
    if (p.market_value == 0.0) continue;  // zero holdings carry no weight
    auto [it, inserted] = out.weights.emplace(p.asset_id, p.market_value);
    if (!inserted) {
      fail(errc::duplicate_key, "asset '" + p.asset_id + "' appears twice in account '" +
                                    p.account_id + "' for " + p.month);
    }
    total += p.market_value;
  }
  if (!(total > 0.0)) {
    fail(errc::zero_total_value,
         "account '" + out.account_id + "' has zero total value in " + out.month);
  }
  for (auto& [asset, w] : out.weights) w /= total;
  return out;
}

std::vector<AccountMonthPortfolio> build_all_weights(
    const std::vector<PositionRecord>& positions,
    std::map<std::string, std::string>* household_of) {
  std::map<std::pair<std::string, std::string>, std::vector<PositionRecord>> groups;
  for (const auto& p : positions) {
    groups[{p.account_id, p.month}].push_back(p);
    if (household_of != nullptr) (*household_of)[p.account_id] = p.household_id;
  }
  std::vector<AccountMonthPortfolio> out;
  out.reserve(groups.size());
  for (const auto& [key, group] : groups) out.push_back(build_weights(group));
  return out;
}

namespace {

template <typename Record>
std::vector<Record> window_impl(const std::vector<Record>& sorted, const std::string& as_of,
                                std::size_t length, const std::string& what) {
  if (length < 1) {
    fail(errc::invalid_argument, "window length must be >= 1");
  }
  if (!is_month(as_of)) {
    fail(errc::invalid_argument, "as_of must be a month (YYYY-MM), got '" + as_of + "'");
  }
  // Records strictly before the as_of month; the series is date-sorted,
  // so the window is the last `length` of them.
  std::size_t end = 0;
  for (const auto& rec : sorted) {
    if (month_of_date(rec.date) < as_of) ++end;
    else break;
  }
  if (end < length) {
    fail(errc::insufficient_history, what + ": need " + std::to_string(length) +
                                         " records before " + as_of + ", have " +
                                         std::to_string(end));
  }
  return std::vector<Record>(sorted.begin() + static_cast<std::ptrdiff_t>(end - length),
                             sorted.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace

std::vector<DatedValue> rolling_window(const std::vector<DatedValue>& series,
                                       const std::string& as_of, std::size_t length) {
  return window_impl(series, as_of, length, "value series");
}

FactorSeries rolling_window(const FactorSeries& series, const std::string& as_of,
                            std::size_t length) {
  FactorSeries out;
  out.observations = window_impl(series.observations, as_of, length, "factor series");
  return out;
}

std::vector<DatedValue> monthly_last(const std::vector<DatedValue>& series) {
  std::vector<DatedValue> out;
  for (const auto& rec : series) {
    std::string month = month_of_date(rec.date);
    if (!out.empty() && out.back().date == month) {
      out.back().value = rec.value;  // later observation in the same month wins
    } else {
      out.push_back(DatedValue{std::move(month), rec.value});
    }
  }
  return out;
}

void write_positions(const std::string& path, const std::vector<PositionRecord>& records) {
  std::ofstream out = open_for_write(path);
  out << kPositionsHeader << "\n";
  for (const auto& r : records) {
    out << r.household_id << "," << r.account_id << "," << r.month << "," << r.asset_id << ","
        << format_decimal(r.market_value) << "\n";
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

void write_profiles(const std::string& path, const std::vector<HouseholdProfile>& profiles) {
  std::ofstream out = open_for_write(path);
  out << kProfilesHeader << "\n";
  for (const auto& p : profiles) {
    out << p.household_id << "," << p.net_worth_band << "," << p.income_band << ","
        << knowledge_name(p.knowledge) << "," << p.age_band << "," << p.n_children << ","
        << marital_name(p.marital) << "," << p.residence_years << "," << p.n_cars << ","
        << p.n_credit_cards << "," << account_type_name(p.account_type) << ","
        << segment_name(p.segment) << "\n";
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

void write_vix(const std::string& path, const std::vector<DatedValue>& series) {
  std::ofstream out = open_for_write(path);
  out << kVixHeader << "\n";
  for (const auto& rec : series) {
    out << rec.date << "," << format_decimal(rec.value) << "\n";
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

void write_factors(const std::string& path, const FactorSeries& series) {
  std::ofstream out = open_for_write(path);
  out << kFactorsHeader << "\n";
  for (const auto& obs : series.observations) {
    out << obs.date;
    for (int j = 0; j < kNumFactors; ++j) {
      out << "," << format_decimal(obs.f[static_cast<std::size_t>(j)]);
    }
    out << "," << format_decimal(obs.rf) << "\n";
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

void write_asset_returns(const std::string& path,
                         const std::map<std::string, std::vector<DatedValue>>& by_asset) {
  std::ofstream out = open_for_write(path);
  out << kAssetReturnsHeader << "\n";
  for (const auto& [asset, series] : by_asset) {
    for (const auto& rec : series) {
      out << rec.date << "," << asset << "," << format_decimal(rec.value) << "\n";
    }
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

}  // namespace cmlm
