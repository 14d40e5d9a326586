#pragma once

#include <cstdint>
#include <vector>

#include "eegrid/recording.hpp"

namespace eegrid {

// Stand-in 10-20 flat-projection montages. Coordinates sit exactly on the
// default 15x15 pixel grid (x = col/14, y = row/14), rows front to back.
// The 34-electrode layout is the 32-electrode one plus PO7/PO8.
Montage builtin_montage_sad34();
Montage builtin_montage_deap32();

// Desk-scale substitute for the private/licensed datasets. Every channel
// carries white noise plus a per-subject random-frequency "fingerprint" tone
// (a spectral nuisance that survives z-normalization and swamps channel-wise
// feature matching); the class signal is an alpha tone planted at the
// `active_electrodes` electrodes nearest a per-subject jittered point around
// the class's scalp region (frontal for patients, parietal for controls).
// Spatial smoothing averages the fingerprints of neighboring sensors while
// the planted bump stays coherent, which is what the topographic
// representation is supposed to buy.
struct SyntheticSpec {
  int subjects{64};  // half patients, half controls
  double seconds{60.0};
  double sample_rate_hz{128.0};
  double tone_hz{10.0};
  double tone_amplitude{1.0};
  double noise_amplitude{1.0};
  double fingerprint_amplitude{2.0};
  double fingerprint_block_seconds{5.0};  // nuisance tone re-draws per block
  int active_electrodes{3};
  double jitter_radius{0.18};  // montage coordinate units
  std::uint64_t seed{42};
};

struct SyntheticDataset {
  std::vector<RawRecording> recordings;  // one per subject, trial "rest"
  RatingTable ratings;                   // binary labels keyed like the CSV format
};

SyntheticDataset make_synthetic_dataset(const Montage& montage, const SyntheticSpec& spec);

}  // namespace eegrid
