#pragma once

#include <span>
#include <string>
#include <vector>

#include "eegrid/matrix.hpp"
#include "eegrid/preprocess.hpp"
#include "eegrid/wavelet.hpp"

namespace eegrid {

// Provenance carried by every extracted sample.
struct SampleInfo {
  std::string subject_id;
  std::string trial_id;
  int window_index{0};
  int label{0};

  bool operator==(const SampleInfo&) const = default;
};

// Model-1 sample: one row per channel (montage order), one column per
// feature slot. B = bands for energy-only, 2*bands for energy+entropy.
struct FeatureMatrix {
  Matrix data;                              // M x B
  std::vector<std::string> feature_layout;  // B column names, e.g. "energy:alpha"
  SampleInfo info;
};

// Per-band features of a single channel window (one row of a FeatureMatrix
// before assembly).
struct BandFeatures {
  std::vector<double> mean_energy;      // E_j, one per band
  std::vector<double> relative_energy;  // q_j, sums to 1
  std::vector<double> entropy;          // w_j = -q_j ln q_j
  double total_energy{0.0};
};

// Mean squared magnitude of the coefficients: sum |D_k|^2 / N.
double mean_band_energy(std::span<const double> coeffs);

// q_j = E_j / sum E_j. Throws when all energies are zero.
std::vector<double> relative_energies(std::span<const double> band_energies);

// w_j = -q_j ln q_j with 0 ln 0 := 0. Throws when any q_j is outside [0, 1].
std::vector<double> wavelet_entropy(std::span<const double> q);

BandFeatures compute_band_features(const WpdLeaves& leaves, const std::vector<BandSpec>& bands);

// Runs the level-4 WPD on every channel of the window and assembles the
// M x B matrix: per-band mean energies first, then (if requested) the
// per-band entropies computed from that channel's relative energies.
FeatureMatrix model1_matrix(const WindowSegment& window, const std::vector<BandSpec>& bands,
                            bool include_entropy, const QmfPair& qmf);

std::vector<std::string> feature_layout_names(const std::vector<BandSpec>& bands,
                                              bool include_entropy);

}  // namespace eegrid
