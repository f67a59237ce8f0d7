#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "cmlm/errors.hpp"
#include "commands.hpp"

namespace {

/// Exit-code contract: 0 success, 1 usage, 2 data, 3 numeric.
int exit_code_for(cmlm::errc code) {
  using cmlm::errc;
  switch (code) {
    case errc::invalid_argument:
    case errc::unknown_model:
    case errc::unknown_grouping:
      return 1;  // the request itself is malformed
    case errc::rank_deficient:
    case errc::singular_covariance:
    case errc::tangency_undefined:
    case errc::negative_sharpe_market:
    case errc::degenerate_frontier:
    case errc::projection_out_of_domain:
    case errc::non_positive_risk_aversion:
    case errc::non_positive_theta:
    case errc::non_positive_sigma:
    case errc::no_within_variation:
      return 3;  // inputs parsed but the math degenerates
    default:
      return 2;  // files missing, malformed, or insufficient
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "portfolio risk profiling: estimate asset moments from factor regressions, imply "
      "risk aversion and efficiency from household holdings, regress and plot the results"};
  app.require_subcommand(1);

  cmlm::cli::EstimateArgs estimate;
  CLI::App* cmd_estimate = app.add_subcommand(
      "estimate", "fit per-asset factor loadings on a rolling window and write monthly "
                  "moment snapshots");
  cmd_estimate->add_option("--factors", estimate.factors_path,
                           "factor CSV: date,mkt_rf,smb,hml,rmw,cma,rf")->required();
  cmd_estimate->add_option("--returns", estimate.returns_path,
                           "asset return CSV: date,asset_id,ret")->required();
  cmd_estimate->add_option("--window", estimate.window, "window length in months")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_estimate->add_option("--out", estimate.out_path, "moments artifact path")->required();

  cmlm::cli::InferArgs infer;
  CLI::App* cmd_infer = app.add_subcommand(
      "infer", "score every account-month against its snapshot's capital market line");
  cmd_infer->add_option("--moments", infer.moments_path, "moments artifact from estimate")
      ->required();
  cmd_infer->add_option("--positions", infer.positions_path,
                        "positions CSV: household_id,account_id,month,asset_id,market_value")
      ->required();
  cmd_infer->add_option("--rf-source", infer.rf_source,
                        "risk-free source; 'factors' uses the rate embedded in the snapshots");
  cmd_infer->add_option("--out", infer.out_path, "profiles CSV path")->required();

  cmlm::cli::RegressArgs regress;
  CLI::App* cmd_regress = app.add_subcommand(
      "regress", "fixed-effects panel regression of a profiled quantity on covariates");
  cmd_regress->add_option("--profiles", regress.profiles_path, "profiles CSV from infer")
      ->required();
  cmd_regress->add_option("--demographics", regress.demographics_path,
                          "household attribute CSV")->required();
  cmd_regress->add_option("--vix", regress.vix_path, "volatility index CSV: date,vix_close")
      ->required();
  cmd_regress->add_option("--model", regress.model_id,
                          "model id: rv1..rv4, eff1..eff5, eff_twoway1..eff_twoway4")
      ->required();
  cmd_regress->add_option("--out", regress.out_path,
                          "report path (machine-readable copy at <out>.csv)")->required();

  cmlm::cli::PlotDataArgs plotdata;
  CLI::App* cmd_plotdata = app.add_subcommand(
      "plotdata", "emit plot-ready CSV: histograms by category or (x, theta) scatters");
  cmd_plotdata->add_option("--profiles", plotdata.profiles_path, "profiles CSV from infer")
      ->required();
  cmd_plotdata->add_option("--by", plotdata.by,
                           "grouping: account_type|net_worth|knowledge|segment|age|children|"
                           "sharpe|stddev")
      ->required();
  cmd_plotdata->add_option("--demographics", plotdata.demographics_path,
                           "household attribute CSV (required for categorical groupings)");
  cmd_plotdata->add_option("--out", plotdata.out_path, "plot data CSV path")->required();
  cmd_plotdata->add_option("--svg", plotdata.svg_path, "also render a static SVG figure here");

  cmlm::cli::SynthArgs synth;
  CLI::App* cmd_synth = app.add_subcommand(
      "synth", "generate a seeded synthetic cohort with planted risk aversion");
  cmd_synth->add_option("--config", synth.config_path, "flat key=value config file")->required();
  cmd_synth->add_option("--out", synth.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message / help text
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_estimate->parsed()) {
      cmlm::cli::cmd_estimate(estimate);
    } else if (cmd_infer->parsed()) {
      cmlm::cli::cmd_infer(infer);
    } else if (cmd_regress->parsed()) {
      cmlm::cli::cmd_regress(regress);
    } else if (cmd_plotdata->parsed()) {
      cmlm::cli::cmd_plotdata(plotdata);
    } else if (cmd_synth->parsed()) {
      cmlm::cli::cmd_synth(synth);
    }
  } catch (const cmlm::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", cmlm::errc_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
