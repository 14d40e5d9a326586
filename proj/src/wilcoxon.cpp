#include "eegrid/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace eegrid {

namespace {

// Average ranks of |d| ascending, doubled so ties stay integral.
std::vector<long> doubled_ranks(const std::vector<double>& abs_d) {
  const std::size_t n = abs_d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return abs_d[i] < abs_d[j]; });

  std::vector<long> rank2(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    // ranks i+1 .. j+1 averaged; doubled average = (i+1) + (j+1)
    const long doubled = static_cast<long>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) rank2[order[t]] = doubled;
    i = j + 1;
  }
  return rank2;
}

// P(S >= observed) where S is the sum of doubled ranks over a uniformly
// random subset of the n pairs (the 2^n equally likely sign assignments).
double exact_upper_tail(const std::vector<long>& rank2, long observed) {
  long total = 0;
  for (long r : rank2) total += r;
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  long reach = 0;
  for (long r : rank2) {
    reach += r;
    for (long s = reach; s >= r; --s)
      count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
  }
  double tail = 0.0;
  for (long s = std::max(observed, 0L); s <= total; ++s)
    tail += count[static_cast<std::size_t>(s)];
  return tail / std::ldexp(1.0, static_cast<int>(rank2.size()));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::runtime_error("wilcoxon: length mismatch");

  std::vector<double> abs_d;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  if (abs_d.empty()) throw std::runtime_error("wilcoxon: no nonzero pairs");
  if (abs_d.size() < 5)
    throw std::runtime_error("wilcoxon: fewer than 5 nonzero pairs");

  const auto rank2 = doubled_ranks(abs_d);
  long w2 = 0;  // doubled W+
  for (std::size_t i = 0; i < rank2.size(); ++i) {
    if (positive[i]) w2 += rank2[i];
  }

  WilcoxonResult res;
  res.n = abs_d.size();
  res.w_plus = static_cast<double>(w2) / 2.0;

  if (res.n <= 25) {
    res.exact = true;
    res.p_one_sided = exact_upper_tail(rank2, w2);
    return res;
  }

  const double n = static_cast<double>(res.n);
  const double mean = n * (n + 1.0) / 4.0;
  double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  // Tie correction: subtract sum(t^3 - t)/48 per tied group.
  {
    std::vector<double> sorted(abs_d);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      if (t > 1.0) variance -= (t * t * t - t) / 48.0;
      i = j + 1;
    }
  }
  if (variance <= 0.0) throw std::runtime_error("wilcoxon: zero variance after tie correction");
  const double z = (res.w_plus - mean - 0.5) / std::sqrt(variance);
  res.exact = false;
  res.p_one_sided = 0.5 * std::erfc(z / std::sqrt(2.0));
  return res;
}

}  // namespace eegrid
