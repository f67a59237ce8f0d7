#pragma once

#include <string>
#include <vector>

#include "cmlm/factor_model.hpp"

namespace cmlm {

/// One month's estimated moments plus the subset of asset ids whose
/// tangency portfolio defines the capital market line that month.
/// `moments` covers every asset estimable that month; scoring of held
/// portfolios uses all of them, line construction only the market subset.
struct MomentsSnapshot {
  std::string month;  // YYYY-MM
  MarketMoments moments;
  std::vector<std::string> market_ids;
};

/// Versioned text artifact ("cmlm1"). One block per month:
///   month,YYYY-MM / rf,v / market,ids... / assets,ids... /
///   mu,values... / sigma,row... (one line per row) / end
void write_moments(const std::string& path, const std::vector<MomentsSnapshot>& snapshots);
std::vector<MomentsSnapshot> read_moments(const std::string& path);

/// Restriction of `moments` to `ids` (mu and sigma re-indexed in the
/// given order). Every id must be present.
MarketMoments subset_moments(const MarketMoments& moments, const std::vector<std::string>& ids);

}  // namespace cmlm
