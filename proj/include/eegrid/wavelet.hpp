#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "eegrid/recording.hpp"

namespace eegrid {

// Orthonormal two-channel analysis pair: highpass[k] = (-1)^k * lowpass[7-k].
struct QmfPair {
  std::array<double, 8> lowpass{};
  std::array<double, 8> highpass{};
};

// The 8-tap Daubechies filter with 4 vanishing moments (db4), extremal-phase
// ordering. sum(lowpass) = sqrt(2), sum of squares = 1.
QmfPair make_db4();

// One analysis split with periodic (circular) extension:
//   approx[i] = sum_j lowpass[j]  * x[(2i + j) mod L]
//   detail[i] = sum_j highpass[j] * x[(2i + j) mod L]
// Requires even L >= 2. Conserves energy exactly (up to rounding).
void analysis_step(std::span<const double> signal, const QmfPair& qmf,
                   std::vector<double>& approx, std::vector<double>& detail);

// Full wavelet packet tree: both branches split recursively to `level`.
// Leaves are stored in natural (filter-tree) order; leaf index bits read
// MSB-first as the low/high choice at each level.
struct WpdLeaves {
  int level{0};
  std::size_t leaf_length{0};
  std::vector<std::vector<double>> leaves;  // 2^level entries, natural order
};

WpdLeaves wpd_decompose(std::span<const double> signal, const QmfPair& qmf, int level = 4);

// Maps frequency-ordered leaf index to natural tree index (binary-reflected
// Gray code; the highpass branch inverts the spectrum at each split).
std::vector<std::size_t> frequency_order(int level);

enum class Band { Delta, Theta, Alpha, Beta, Gamma };

std::string band_name(Band b);

struct BandSpec {
  Band band{Band::Delta};
  double low_hz{0.0};
  double high_hz{0.0};
  std::vector<std::size_t> leaf_indices;  // frequency-ordered, ascending
};

// Band table at a given sampling rate and depth. Five bands covering
// 0-48 Hz when include_delta, four covering 4-48 Hz otherwise; throws if a
// band edge does not align with the leaf grid.
std::vector<BandSpec> make_band_specs(double sample_rate_hz, int level, bool include_delta);

// Concatenation of the band's frequency-ordered leaves, ascending frequency.
std::vector<double> band_extract(const WpdLeaves& leaves, const BandSpec& spec);

}  // namespace eegrid
