#pragma once

#include <cstddef>
#include <span>

namespace eegrid {

struct WilcoxonResult {
  double w_plus{0.0};      // signed-rank statistic (ranks of positive differences)
  std::size_t n{0};        // pairs remaining after zero differences are dropped
  double p_one_sided{0.0}; // alternative hypothesis: b > a
  bool exact{false};       // true when the 2^n sign distribution was used
};

// One-sided Wilcoxon signed-rank test of H1: b stochastically greater than a.
// Zero differences are dropped; ties in |d| share average ranks. n <= 25 uses
// the exact sign-assignment distribution (computed by dynamic programming
// over rank sums), larger n the normal approximation with continuity
// correction and tie-adjusted variance. Throws when every difference is zero
// ("no nonzero pairs") or fewer than 5 remain.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace eegrid
