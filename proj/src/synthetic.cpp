#include "eegrid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eegrid/util.hpp"

namespace eegrid {

namespace {

struct Electrode {
  const char* name;
  int col;
  int row;
};

// 15x15 grid positions; row 0 is frontal, column 7 the midline. The first 32
// entries follow the conventional 32-channel ordering (left hemisphere block,
// then right), which keeps adjacent scalp sites non-adjacent in row order.
constexpr Electrode kLayout[34] = {
    {"Fp1", 5, 1}, {"AF3", 4, 2},  {"F3", 4, 4},   {"F7", 1, 4},   {"FC5", 2, 6},
    {"FC1", 5, 6}, {"C3", 3, 7},   {"T7", 0, 7},   {"CP5", 2, 8},  {"CP1", 5, 8},
    {"P3", 4, 10}, {"P7", 1, 10},  {"PO3", 4, 12}, {"O1", 5, 13},  {"Oz", 7, 13},
    {"Pz", 7, 10}, {"Fp2", 9, 1},  {"AF4", 10, 2}, {"Fz", 7, 4},   {"F4", 10, 4},
    {"F8", 13, 4}, {"FC6", 12, 6}, {"FC2", 9, 6},  {"Cz", 7, 7},   {"C4", 11, 7},
    {"T8", 14, 7}, {"CP6", 12, 8}, {"CP2", 9, 8},  {"P4", 10, 10}, {"P8", 13, 10},
    {"PO4", 10, 12}, {"O2", 9, 13}, {"PO7", 2, 12}, {"PO8", 12, 12}};

Montage montage_from_layout(std::size_t count) {
  Montage m;
  for (std::size_t i = 0; i < count; ++i) {
    m.names.emplace_back(kLayout[i].name);
    m.positions.emplace_back(kLayout[i].col / 14.0, kLayout[i].row / 14.0);
  }
  return m;
}

double quantize_f32(double x) { return static_cast<double>(static_cast<float>(x)); }

}  // namespace

Montage builtin_montage_sad34() { return montage_from_layout(34); }
Montage builtin_montage_deap32() { return montage_from_layout(32); }

SyntheticDataset make_synthetic_dataset(const Montage& montage, const SyntheticSpec& spec) {
  if (spec.subjects < 2 || spec.subjects % 2 != 0)
    throw std::runtime_error("synthetic: subject count must be even and >= 2");
  if (spec.active_electrodes < 1 ||
      static_cast<std::size_t>(spec.active_electrodes) > montage.size())
    throw std::runtime_error("synthetic: active electrode count out of range");
  if (spec.seconds <= 0.0 || spec.sample_rate_hz <= 0.0)
    throw std::runtime_error("synthetic: duration and rate must be positive");

  const auto samples =
      static_cast<std::size_t>(std::llround(spec.seconds * spec.sample_rate_hz));
  const std::size_t m = montage.size();

  // Class scalp regions the per-subject activity centers wander around.
  const std::pair<double, double> patient_center{0.5, 2.5 / 14.0};  // frontal midline
  const std::pair<double, double> control_center{0.5, 11.0 / 14.0}; // parietal midline

  SyntheticDataset out;
  out.recordings.reserve(static_cast<std::size_t>(spec.subjects));

  for (int s = 0; s < spec.subjects; ++s) {
    const int label = s < spec.subjects / 2 ? 1 : 0;
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(s)));

    const auto& center = label == 1 ? patient_center : control_center;
    const double angle = 2.0 * std::numbers::pi * rng.uniform01();
    const double radius = spec.jitter_radius * std::sqrt(rng.uniform01());
    const double px = center.first + radius * std::cos(angle);
    const double py = center.second + radius * std::sin(angle);

    // The active electrodes are the nearest to the jittered center point.
    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto [x, y] = montage.positions[i];
      const double dx = x - px;
      const double dy = y - py;
      by_distance.emplace_back(dx * dx + dy * dy, i);
    }
    std::sort(by_distance.begin(), by_distance.end());
    std::vector<bool> active(m, false);
    for (int i = 0; i < spec.active_electrodes; ++i) active[by_distance[i].second] = true;

    RawRecording rec;
    rec.subject_id = "s" + std::string(s + 1 < 10 ? "0" : "") + std::to_string(s + 1);
    rec.trial_id = "rest";
    rec.sample_rate_hz = spec.sample_rate_hz;
    rec.channels = montage.names;
    rec.data = Matrix(m, samples);

    const double omega = 2.0 * std::numbers::pi * spec.tone_hz / spec.sample_rate_hz;
    const auto block_len = static_cast<std::size_t>(
        std::llround(std::max(0.5, spec.fingerprint_block_seconds) * spec.sample_rate_hz));
    for (std::size_t ch = 0; ch < m; ++ch) {
      const double phase = 2.0 * std::numbers::pi * rng.uniform01();
      // Spectral nuisance: a tone at a random frequency away from the band
      // edges, re-drawn every block so successive windows carry different
      // fingerprints (nonstationary background).
      double fp_omega = 0.0;
      double fp_phase = 0.0;
      auto row = rec.data.row(ch);
      for (std::size_t t = 0; t < samples; ++t) {
        if (t % block_len == 0) {
          const double fp_hz = 2.0 + 44.0 * rng.uniform01();
          fp_omega = 2.0 * std::numbers::pi * fp_hz / spec.sample_rate_hz;
          fp_phase = 2.0 * std::numbers::pi * rng.uniform01();
        }
        double v = spec.noise_amplitude * rng.normal() +
                   spec.fingerprint_amplitude * std::sin(fp_omega * t + fp_phase);
        if (active[ch]) v += spec.tone_amplitude * std::sin(omega * t + phase);
        row[t] = quantize_f32(v);
      }
    }
    out.ratings.values[{rec.subject_id, rec.trial_id}] = static_cast<double>(label);
    out.recordings.push_back(std::move(rec));
  }
  return out;
}

}  // namespace eegrid
