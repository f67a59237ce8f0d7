#include "cmlm/model_registry.hpp"

#include "cmlm/errors.hpp"

namespace cmlm {

namespace {

const std::vector<std::string>& demographic_block() {
  static const std::vector<std::string> names = {
      "net_worth_2", "net_worth_3", "net_worth_4", "net_worth_5", "net_worth_6",
      "income_2", "income_3", "income_4", "income_5",
      "knowledge_good", "knowledge_limited", "knowledge_none", "knowledge_unknown",
      "age_2", "age_3", "age_4", "age_5", "age_6", "age_7",
      "n_children",
      "marital_single", "marital_inferred_married", "marital_inferred_single",
      "marital_unknown",
      "residence_years", "n_cars", "n_credit_cards"};
  return names;
}

const std::vector<std::string>& account_block() {
  static const std::vector<std::string> names = {
      "account_ira", "account_keogh", "account_margin", "account_schwab_one",
      "segment_affluent", "segment_general"};
  return names;
}

const std::vector<std::string>& portfolio_block() {
  static const std::vector<std::string> names = {"n_stocks", "sharpe", "mu_obs", "sigma_obs"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& segment_interactions() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"segment_general", "n_stocks"}, {"segment_active_trader", "n_stocks"}};
  return pairs;
}

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> blocks) {
  std::vector<std::string> out;
  for (const auto* block : blocks) out.insert(out.end(), block->begin(), block->end());
  return out;
}

std::vector<std::string> vix_plus(const std::vector<std::string>& rest) {
  std::vector<std::string> out = {"vix"};
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

ModelDef make_model(std::string id, std::string response, Effects effects,
                    std::vector<std::string> regressors,
                    std::vector<std::pair<std::string, std::string>> interactions,
                    std::string description) {
  ModelDef def;
  def.id = std::move(id);
  def.response = std::move(response);
  def.spec.effects = effects;
  def.spec.regressors = std::move(regressors);
  def.spec.interactions = std::move(interactions);
  def.description = std::move(description);
  return def;
}

}  // namespace

const std::vector<ModelDef>& model_registry() {
  static const std::vector<ModelDef> models = [] {
    const auto& demog = demographic_block();
    const auto& acct = account_block();
    const auto& port = portfolio_block();
    const auto& ints = segment_interactions();
    std::vector<ModelDef> defs;
    defs.push_back(make_model(
        "rv1", "theta", Effects::time, concat({&demog, &acct}), {},
        "risk aversion on demographics + account info, time effects"));
    defs.push_back(make_model(
        "rv2", "theta", Effects::time, concat({&demog, &acct, &port}), ints,
        "risk aversion on demographics + account + portfolio info, time effects"));
    defs.push_back(make_model(
        "rv3", "theta", Effects::entity, {"vix"}, {},
        "risk aversion on market volatility, entity effects"));
    defs.push_back(make_model(
        "rv4", "theta", Effects::entity, vix_plus(port), ints,
        "risk aversion on market volatility + portfolio info, entity effects"));
    defs.push_back(make_model(
        "eff1", "efficiency", Effects::time, demog, {},
        "efficiency on demographics, time effects"));
    defs.push_back(make_model(
        "eff2", "efficiency", Effects::time, concat({&demog, &acct}), {},
        "efficiency on demographics + account info, time effects"));
    defs.push_back(make_model(
        "eff3", "efficiency", Effects::time, concat({&demog, &acct, &port}), {},
        "efficiency on demographics + account + portfolio info, time effects"));
    defs.push_back(make_model(
        "eff4", "efficiency", Effects::entity, {"vix"}, {},
        "efficiency on market volatility, entity effects"));
    defs.push_back(make_model(
        "eff5", "efficiency", Effects::entity, vix_plus(port), {},
        "efficiency on market volatility + portfolio info, entity effects"));
    defs.push_back(make_model(
        "eff_twoway1", "efficiency", Effects::two_way, {"n_stocks"}, {},
        "efficiency on holdings count, two-way effects"));
    defs.push_back(make_model(
        "eff_twoway2", "efficiency", Effects::two_way, {"n_stocks", "sharpe"}, {},
        "efficiency on holdings count + Sharpe ratio, two-way effects"));
    defs.push_back(make_model(
        "eff_twoway3", "efficiency", Effects::two_way, {"n_stocks", "sharpe", "mu_obs"}, {},
        "efficiency on holdings count + Sharpe + mean return, two-way effects"));
    defs.push_back(make_model(
        "eff_twoway4", "efficiency", Effects::two_way,
        {"n_stocks", "sharpe", "mu_obs", "sigma_obs"}, {},
        "efficiency on holdings count + Sharpe + mean + volatility, two-way effects"));
    return defs;
  }();
  return models;
}

const ModelDef& find_model(const std::string& id) {
  for (const auto& def : model_registry()) {
    if (def.id == id) return def;
  }
  std::string known;
  for (const auto& def : model_registry()) {
    if (!known.empty()) known += ", ";
    known += def.id;
  }
  fail(errc::unknown_model, "unknown model '" + id + "' (known: " + known + ")");
}

const std::map<std::string, std::string>& display_names() {
  static const std::map<std::string, std::string> names = {
      {"net_worth_2", "Net Worth 25,000-49,999"},
      {"net_worth_3", "Net Worth 50,000-74,999"},
      {"net_worth_4", "Net Worth 75,000-99,999"},
      {"net_worth_5", "Net Worth 100,000-249,999"},
      {"net_worth_6", "Net Worth >250,000"},
      {"income_2", "Income 25,000-49,999"},
      {"income_3", "Income 50,000-74,999"},
      {"income_4", "Income 75,000-99,999"},
      {"income_5", "Income >100,000"},
      {"knowledge_good", "Good Knowledge"},
      {"knowledge_limited", "Limited Knowledge"},
      {"knowledge_none", "None Knowledge"},
      {"knowledge_unknown", "Unknown Knowledge"},
      {"age_2", "Ages 25-34"},
      {"age_3", "Ages 35-44"},
      {"age_4", "Ages 45-54"},
      {"age_5", "Ages 55-64"},
      {"age_6", "Ages 65-74"},
      {"age_7", "Ages >75"},
      {"n_children", "Num. of Children"},
      {"marital_single", "Single"},
      {"marital_inferred_married", "Inferred Married"},
      {"marital_inferred_single", "Inferred Single"},
      {"marital_unknown", "Unknown Marital"},
      {"residence_years", "Length of Residence"},
      {"n_cars", "Num. of Cars"},
      {"n_credit_cards", "Num. of Credit Cards"},
      {"account_ira", "IRA Account"},
      {"account_keogh", "Keogh Account"},
      {"account_margin", "Margin Account"},
      {"account_schwab_one", "Schwab Account"},
      {"segment_affluent", "Affluent Household"},
      {"segment_general", "General Brokerage"},
      {"n_stocks", "Num. of Stocks"},
      {"sharpe", "Portfolio Sharpe Ratio"},
      {"mu_obs", "Portfolio Expected Return"},
      {"sigma_obs", "Portfolio Std. Deviation"},
      {"vix", "VIX Index"},
      {"segment_general x n_stocks", "General Brokerage x Num. of Stocks"},
      {"segment_active_trader x n_stocks", "Active Trader x Num. of Stocks"},
  };
  return names;
}

std::vector<std::string> reference_level_notes() {
  return {
      "Reference levels: Net Worth 1-24,999; Income 1-24,999; Extensive Knowledge;",
      "Ages 18-24; Married; Cash Account; Active Trader segment.",
  };
}

void add_profile_covariates(const HouseholdProfile& profile,
                            std::map<std::string, double>& covariates) {
  for (int band = 1; band <= 6; ++band) {
    covariates["net_worth_" + std::to_string(band)] = profile.net_worth_band == band ? 1.0 : 0.0;
  }
  for (int band = 1; band <= 5; ++band) {
    covariates["income_" + std::to_string(band)] = profile.income_band == band ? 1.0 : 0.0;
  }
  for (const auto level : {Knowledge::extensive, Knowledge::good, Knowledge::limited,
                           Knowledge::none, Knowledge::unknown}) {
    covariates[std::string("knowledge_") + knowledge_name(level)] =
        profile.knowledge == level ? 1.0 : 0.0;
  }
  for (int band = 1; band <= 7; ++band) {
    covariates["age_" + std::to_string(band)] = profile.age_band == band ? 1.0 : 0.0;
  }
  covariates["n_children"] = profile.n_children;
  for (const auto level : {Marital::married, Marital::single, Marital::inferred_married,
                           Marital::inferred_single, Marital::unknown}) {
    covariates[std::string("marital_") + marital_name(level)] =
        profile.marital == level ? 1.0 : 0.0;
  }
  covariates["residence_years"] = profile.residence_years;
  covariates["n_cars"] = profile.n_cars;
  covariates["n_credit_cards"] = profile.n_credit_cards;
  for (const auto level : {AccountType::cash, AccountType::ira, AccountType::keogh,
                           AccountType::margin, AccountType::schwab_one}) {
    covariates[std::string("account_") + account_type_name(level)] =
        profile.account_type == level ? 1.0 : 0.0;
  }
  for (const auto level : {Segment::active_trader, Segment::affluent, Segment::general}) {
    covariates[std::string("segment_") + segment_name(level)] =
        profile.segment == level ? 1.0 : 0.0;
  }
}

}  // namespace cmlm
