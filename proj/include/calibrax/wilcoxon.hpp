#pragma once

#include <cstddef>
#include <span>

namespace calibrax {

struct WilcoxonResult {
  double p_value = 1.0;
  double w_plus = 0.0;  // sum of ranks of positive differences
  std::size_t n = 0;    // nonzero differences
  bool exact = false;
};

// Minimum number of nonzero paired differences the test accepts.
inline constexpr std::size_t kWilcoxonMinPairs = 5;

// Two-sided Wilcoxon signed-rank test on xs - ys. Zero differences are
// dropped; tied magnitudes get average ranks. Up to 12 pairs the null
// distribution is enumerated exactly, above that a normal approximation
// with tie and continuity corrections is used.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> xs,
                                    std::span<const double> ys);

}  // namespace calibrax
