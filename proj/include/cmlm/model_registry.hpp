#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmlm/ingest.hpp"
#include "cmlm/panel.hpp"

namespace cmlm {

/// A named, reproducible regression shape: which response, which effects,
/// and which covariate columns, so report columns can be rerun by id.
struct ModelDef {
  std::string id;
  std::string response;  // "theta" or "efficiency"
  RegressionSpec spec;
  std::string description;
};

/// All built-in models: rv1..rv4 regress implied risk aversion, eff1..eff5
/// and eff_twoway1..4 regress the efficiency score.
const std::vector<ModelDef>& model_registry();

/// Lookup by id; unknown ids are errors.
const ModelDef& find_model(const std::string& id);

/// Raw covariate/term names -> presentation labels for report tables.
const std::map<std::string, std::string>& display_names();

/// Footnote lines documenting the dropped reference level of every
/// categorical, for inclusion under report tables.
std::vector<std::string> reference_level_notes();

/// Expands a profile into the full set of named covariates: one 0/1
/// dummy per categorical level (reference levels included, so
/// interactions can use them) plus the numeric fields.
void add_profile_covariates(const HouseholdProfile& profile,
                            std::map<std::string, double>& covariates);

}  // namespace cmlm
