#pragma once

#include <string>

namespace cmlm::cli {

struct EstimateArgs {
  std::string factors_path;
  std::string returns_path;
  int window = 36;
  std::string out_path;
};

struct InferArgs {
  std::string moments_path;
  std::string positions_path;
  std::string rf_source = "factors";
  std::string out_path;
};

struct RegressArgs {
  std::string profiles_path;
  std::string demographics_path;
  std::string vix_path;
  std::string model_id;
  std::string out_path;
};

struct PlotDataArgs {
  std::string profiles_path;
  std::string demographics_path;  // required for the categorical groupings
  std::string by;
  std::string out_path;
  std::string svg_path;  // empty = no figure
};

struct SynthArgs {
  std::string config_path;
  std::string out_dir;
};

/// Subcommand bodies. Each loads its inputs, runs the corresponding library
/// pipeline stage, writes its outputs, and prints a one-line summary to
/// stdout; failures raise cmlm::Error for main() to map onto exit codes.
void cmd_estimate(const EstimateArgs& args);
void cmd_infer(const InferArgs& args);
void cmd_regress(const RegressArgs& args);
void cmd_plotdata(const PlotDataArgs& args);
void cmd_synth(const SynthArgs& args);

/// Header of the profiles CSV that cmd_infer writes and cmd_regress /
/// cmd_plotdata read back.
extern const char kProfilesCsvHeader[];

}  // namespace cmlm::cli
