#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eegrid/cnn.hpp"

namespace eegrid::selfcheck {

// Independent oracles used by the selftest command and the verification
// suites. Nothing here calls into the implementation paths it is used to
// check: band energies come from a direct DFT, the neighbor scan is a full
// stable sort, the Wilcoxon tail is a literal 2^n enumeration.

// Fraction of signal energy inside [lo_hz, hi_hz), mirrored bins included.
double dft_band_energy_fraction(std::span<const double> x, double sample_rate_hz, double lo_hz,
                                double hi_hz);

// Exhaustive-scan kNN with (distance, index) ordering.
int knn_exhaustive(const std::vector<std::vector<double>>& train_x,
                   const std::vector<int>& train_y, std::span<const double> query, int k);

// One-sided exact p-value, alternative b > a, by enumerating all 2^n sign
// assignments. n is capped at 20 to keep the enumeration honest but fast.
double wilcoxon_enumeration_p(std::span<const double> a, std::span<const double> b);

// Central finite differences of `loss` with respect to every entry of every
// parameter tensor. `loss` must be deterministic between calls.
std::vector<std::vector<double>> finite_difference_gradients(const std::function<double()>& loss,
                                                             std::vector<ParamRef>& params,
                                                             double eps = 1e-5);

// Adds small noise to every parameter (biases included). Zero-initialized
// biases otherwise leave ReLU units exactly on their kink, where central
// differences straddle the non-differentiable point.
void randomize_parameters(Network& net, std::uint64_t seed, double scale = 0.05);

struct SuiteResult {
  std::string name;
  bool pass{false};
  std::string detail;
};

// Compact oracle suites (wavelet energy, tone probe, interpolation bounds,
// classifier oracles, gradient check). `quick` trims the sample counts.
std::vector<SuiteResult> run_selftest(bool quick);

}  // namespace eegrid::selfcheck
