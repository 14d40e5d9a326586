#pragma once

#include <string>
#include <vector>

#include "eegrid/matrix.hpp"
#include "eegrid/recording.hpp"

namespace eegrid {

// Fixed-length window cut from one recording. All windows of one
// segmentation share the same length L = round(window_seconds * rate).
struct WindowSegment {
  std::string subject_id;
  std::string trial_id;
  int window_index{0};
  Matrix data;  // M x L
  int label{0};
};

// Subtracts the across-channel mean at every time index. Requires M >= 2.
RawRecording common_average_reference(const RawRecording& rec);

// Per-channel z-score over the whole recording (population variance).
// Constant channels map to all zeros.
RawRecording normalize_channel(const RawRecording& rec);

// Cuts windows starting at baseline_trim + i * shift; trailing partial
// windows are discarded. Throws if the recording is shorter than one window.
std::vector<WindowSegment> segment(const RawRecording& rec, double window_seconds,
                                   double shift_seconds, double baseline_trim_seconds = 0.0,
                                   int label = 0);

// Integer-factor downsampling with a linear-phase windowed-sinc anti-alias
// lowpass (cutoff at the target Nyquist). rec rate must be an integer
// multiple of target_hz.
std::vector<double> decimate(std::span<const double> signal, int factor);
RawRecording decimate_recording(const RawRecording& rec, double target_hz);

}  // namespace eegrid
