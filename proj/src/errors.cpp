#include "cmlm/errors.hpp"

namespace cmlm {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::insufficient_data: return "insufficient_data";
    case errc::empty_universe: return "empty_universe";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::weights_not_normalized: return "weights_not_normalized";
    case errc::empty_input: return "empty_input";
    case errc::too_few_observations: return "too_few_observations";
    case errc::unknown_regressor: return "unknown_regressor";
    case errc::duplicate_column: return "duplicate_column";
    case errc::no_slopes: return "no_slopes";
    case errc::missing_header: return "missing_header";
    case errc::bad_row: return "bad_row";
    case errc::duplicate_key: return "duplicate_key";
    case errc::zero_total_value: return "zero_total_value";
    case errc::insufficient_history: return "insufficient_history";
    case errc::out_of_domain_value: return "out_of_domain_value";
    case errc::invalid_config: return "invalid_config";
    case errc::unknown_model: return "unknown_model";
    case errc::unknown_grouping: return "unknown_grouping";
    case errc::invalid_argument: return "invalid_argument";
    case errc::io_error: return "io_error";
    case errc::rank_deficient: return "rank_deficient";
    case errc::singular_covariance: return "singular_covariance";
    case errc::tangency_undefined: return "tangency_undefined";
    case errc::negative_sharpe_market: return "negative_sharpe_market";
    case errc::degenerate_frontier: return "degenerate_frontier";
    case errc::projection_out_of_domain: return "projection_out_of_domain";
    case errc::non_positive_risk_aversion: return "non_positive_risk_aversion";
    case errc::non_positive_theta: return "non_positive_theta";
    case errc::non_positive_sigma: return "non_positive_sigma";
    case errc::no_within_variation: return "no_within_variation";
  }
  return "unknown_error";
}

}  // namespace cmlm
