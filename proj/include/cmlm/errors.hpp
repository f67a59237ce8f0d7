#pragma once

#include <stdexcept>
#include <string>

namespace cmlm {

/// Typed failure reasons. Every throwing operation in the library raises
/// cmlm::Error carrying one of these codes so callers (and the CLI's
/// per-row status column) can dispatch without parsing messages.
enum class errc {
  // input shape / data problems
  insufficient_data,
  empty_universe,
  dimension_mismatch,
  weights_not_normalized,
  empty_input,
  too_few_observations,
  unknown_regressor,
  duplicate_column,
  no_slopes,
  missing_header,
  bad_row,
  duplicate_key,
  zero_total_value,
  insufficient_history,
  out_of_domain_value,
  invalid_config,
  unknown_model,
  unknown_grouping,
  invalid_argument,
  io_error,
  // numeric / domain failures
  rank_deficient,
  singular_covariance,
  tangency_undefined,
  negative_sharpe_market,
  degenerate_frontier,
  projection_out_of_domain,
  non_positive_risk_aversion,
  non_positive_theta,
  non_positive_sigma,
  no_within_variation,
};

/// Stable snake_case name for a code; used verbatim as the CLI status column.
const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cmlm
