#pragma once

// Goodness-of-fit helpers shared by the statistical tests.

#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace moneychain::testing {

struct GofResult {
  double statistic = 0.0;
  int dof = 0;
  double critical = 0.0;  // upper quantile at the requested significance
  bool reject = false;
};

/// Pearson chi-square of observed counts against exact cell probabilities.
/// Cells with zero probability must have zero counts (any hit rejects).
inline GofResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& probs, double significance) {
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  GofResult r;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (probs[i] == 0.0) {
      if (observed[i] != 0) r.reject = true;
      continue;
    }
    const double e = total * probs[i];
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
    ++cells;
  }
  r.dof = cells - 1;
  if (r.dof < 1) return r;
  boost::math::chi_squared dist(r.dof);
  r.critical = boost::math::quantile(boost::math::complement(dist, significance));
  r.reject = r.reject || r.statistic > r.critical;
  return r;
}

inline double chi_square_upper_quantile(int dof, double significance) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, significance));
}

}  // namespace moneychain::testing
