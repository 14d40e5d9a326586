#include "eegrid/preprocess.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eegrid {

RawRecording common_average_reference(const RawRecording& rec) {
  if (rec.channel_count() < 2)
    throw std::runtime_error("common average reference needs at least 2 channels");
  RawRecording out = rec;
  const std::size_t m = rec.channel_count();
  const std::size_t t = rec.sample_count();
  for (std::size_t c = 0; c < t; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m; ++r) mean += rec.data.at(r, c);
    mean /= static_cast<double>(m);
    for (std::size_t r = 0; r < m; ++r) out.data.at(r, c) = rec.data.at(r, c) - mean;
  }
  return out;
}

RawRecording normalize_channel(const RawRecording& rec) {
  RawRecording out = rec;
  const std::size_t t = rec.sample_count();
  for (std::size_t r = 0; r < rec.channel_count(); ++r) {
    const auto row = rec.data.row(r);
    double mean = 0.0;
    for (double x : row) mean += x;
    mean /= static_cast<double>(t);
    double var = 0.0;
    for (double x : row) var += (x - mean) * (x - mean);
    var /= static_cast<double>(t);
    auto dst = out.data.row(r);
    if (var == 0.0) {
      for (auto& x : dst) x = 0.0;
    } else {
      const double inv_sd = 1.0 / std::sqrt(var);
      for (std::size_t c = 0; c < t; ++c) dst[c] = (row[c] - mean) * inv_sd;
    }
  }
  return out;
}

std::vector<WindowSegment> segment(const RawRecording& rec, double window_seconds,
                                   double shift_seconds, double baseline_trim_seconds,
                                   int label) {
  if (window_seconds <= 0.0) throw std::runtime_error("window_seconds must be positive");
  if (shift_seconds <= 0.0) throw std::runtime_error("shift_seconds must be positive");
  if (baseline_trim_seconds < 0.0)
    throw std::runtime_error("baseline_trim_seconds must be non-negative");

  const auto window_len =
      static_cast<std::size_t>(std::llround(window_seconds * rec.sample_rate_hz));
  const auto shift_len =
      static_cast<std::size_t>(std::llround(shift_seconds * rec.sample_rate_hz));
  const auto trim_len =
      static_cast<std::size_t>(std::llround(baseline_trim_seconds * rec.sample_rate_hz));
  if (window_len < 2) throw std::runtime_error("window shorter than 2 samples");
  if (shift_len < 1) throw std::runtime_error("shift shorter than 1 sample");

  const std::size_t total = rec.sample_count();
  if (total < trim_len + window_len)
    throw std::runtime_error("recording shorter than baseline trim plus one window");

  const std::size_t count = (total - trim_len - window_len) / shift_len + 1;
  const std::size_t m = rec.channel_count();

  std::vector<WindowSegment> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    WindowSegment w;
    w.subject_id = rec.subject_id;
    w.trial_id = rec.trial_id;
    w.window_index = static_cast<int>(i);
    w.label = label;
    w.data = Matrix(m, window_len);
    const std::size_t start = trim_len + i * shift_len;
    for (std::size_t r = 0; r < m; ++r) {
      const auto src = rec.data.row(r);
      auto dst = w.data.row(r);
      for (std::size_t c = 0; c < window_len; ++c) dst[c] = src[start + c];
    }
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

// Odd-length Hamming-windowed sinc lowpass with cutoff at 1/(2*factor) of the
// input rate, unit DC gain.
std::vector<double> design_antialias_fir(int factor) {
  const int taps = 12 * factor + 1;
  const int center = taps / 2;
  const double fc = 0.5 / static_cast<double>(factor);  // cycles per input sample
  std::vector<double> h(static_cast<std::size_t>(taps));
  double sum = 0.0;
  for (int n = 0; n < taps; ++n) {
    const int k = n - center;
    const double x = 2.0 * std::numbers::pi * fc * k;
    const double sinc = (k == 0) ? 2.0 * fc : std::sin(x) / (std::numbers::pi * k);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / static_cast<double>(taps - 1));
    h[static_cast<std::size_t>(n)] = sinc * window;
    sum += h[static_cast<std::size_t>(n)];
  }
  for (auto& c : h) c /= sum;
  return h;
}

}  // namespace

std::vector<double> decimate(std::span<const double> signal, int factor) {
  if (factor < 1) throw std::runtime_error("decimation factor must be >= 1");
  if (signal.empty()) throw std::runtime_error("cannot decimate an empty signal");
  if (factor == 1) return {signal.begin(), signal.end()};

  const auto h = design_antialias_fir(factor);
  const int center = static_cast<int>(h.size()) / 2;
  const auto n = static_cast<long long>(signal.size());

  // Group delay is compensated by centering the kernel; edges replicate.
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n / factor));
  for (long long i = 0; i < n; i += factor) {
    double acc = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      long long idx = i + static_cast<long long>(j) - center;
      if (idx < 0) idx = 0;
      if (idx >= n) idx = n - 1;
      acc += h[j] * signal[static_cast<std::size_t>(idx)];
    }
    out.push_back(acc);
  }
  return out;
}

RawRecording decimate_recording(const RawRecording& rec, double target_hz) {
  if (target_hz <= 0.0) throw std::runtime_error("target rate must be positive");
  const double ratio = rec.sample_rate_hz / target_hz;
  const int factor = static_cast<int>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - factor) > 1e-9)
    throw std::runtime_error("sample rate " + std::to_string(rec.sample_rate_hz) +
                             " is not an integer multiple of " + std::to_string(target_hz));
  if (factor == 1) return rec;

  RawRecording out;
  out.subject_id = rec.subject_id;
  out.trial_id = rec.trial_id;
  out.sample_rate_hz = target_hz;
  out.channels = rec.channels;
  std::vector<std::vector<double>> rows;
  rows.reserve(rec.channel_count());
  for (std::size_t r = 0; r < rec.channel_count(); ++r)
    rows.push_back(decimate(rec.data.row(r), factor));
  out.data = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), out.data.row(r).begin());
  return out;
}

}  // namespace eegrid
