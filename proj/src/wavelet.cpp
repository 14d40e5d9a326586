#include "eegrid/wavelet.hpp"

#include <cmath>
#include <stdexcept>

namespace eegrid {

QmfPair make_db4() {
  QmfPair qmf;
  // Extremal-phase db4 scaling coefficients (spectral factorization of the
  // half-band polynomial with all roots inside the unit circle).
  qmf.lowpass = {0.2303778133088965,   0.7148465705529157,   0.6308807679298589,
                 -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
                 0.0328830116668852,   -0.010597401785069032};
  for (std::size_t k = 0; k < 8; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    qmf.highpass[k] = sign * qmf.lowpass[7 - k];
  }
  return qmf;
}

void analysis_step(std::span<const double> signal, const QmfPair& qmf,
                   std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = signal.size();
  if (n < 2 || n % 2 != 0)
    throw std::runtime_error("analysis step requires an even signal length >= 2");
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
      const double x = signal[(2 * i + j) % n];
      a += qmf.lowpass[j] * x;
      d += qmf.highpass[j] * x;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

WpdLeaves wpd_decompose(std::span<const double> signal, const QmfPair& qmf, int level) {
  if (level < 1 || level > 24) throw std::runtime_error("decomposition level must be in [1, 24]");
  const std::size_t block = std::size_t{1} << level;
  if (signal.empty() || signal.size() % block != 0)
    throw std::runtime_error("signal length must be divisible by 2^level");

  std::vector<std::vector<double>> nodes;
  nodes.emplace_back(signal.begin(), signal.end());
  for (int l = 0; l < level; ++l) {
    std::vector<std::vector<double>> next;
    next.reserve(nodes.size() * 2);
    for (const auto& node : nodes) {
      std::vector<double> a;
      std::vector<double> d;
      analysis_step(node, qmf, a, d);
      next.push_back(std::move(a));
      next.push_back(std::move(d));
    }
    nodes = std::move(next);
  }

  WpdLeaves out;
  out.level = level;
  out.leaf_length = signal.size() >> level;
  out.leaves = std::move(nodes);
  return out;
}

std::vector<std::size_t> frequency_order(int level) {
  if (level < 1) throw std::runtime_error("frequency_order requires level >= 1");
  const std::size_t count = std::size_t{1} << level;
  std::vector<std::size_t> perm(count);
  for (std::size_t f = 0; f < count; ++f) perm[f] = f ^ (f >> 1);
  return perm;
}

std::string band_name(Band b) {
  switch (b) {
    case Band::Delta: return "delta";
    case Band::Theta: return "theta";
    case Band::Alpha: return "alpha";
    case Band::Beta: return "beta";
    case Band::Gamma: return "gamma";
  }
  return "delta";
}

std::vector<BandSpec> make_band_specs(double sample_rate_hz, int level, bool include_delta) {
  if (sample_rate_hz <= 0.0) throw std::runtime_error("sample rate must be positive");
  const std::size_t count = std::size_t{1} << level;
  const double leaf_width = sample_rate_hz / 2.0 / static_cast<double>(count);

  struct Range {
    Band band;
    double lo, hi;
  };
  const Range ranges[] = {{Band::Delta, 0.0, 4.0},
                          {Band::Theta, 4.0, 8.0},
                          {Band::Alpha, 8.0, 12.0},
                          {Band::Beta, 12.0, 32.0},
                          {Band::Gamma, 32.0, 48.0}};

  std::vector<BandSpec> specs;
  for (const auto& r : ranges) {
    if (!include_delta && r.band == Band::Delta) continue;
    const double lo_idx = r.lo / leaf_width;
    const double hi_idx = r.hi / leaf_width;
    const auto lo = static_cast<std::size_t>(std::llround(lo_idx));
    const auto hi = static_cast<std::size_t>(std::llround(hi_idx));
    if (std::abs(lo_idx - static_cast<double>(lo)) > 1e-9 ||
        std::abs(hi_idx - static_cast<double>(hi)) > 1e-9 || hi > count || lo >= hi) {
      throw std::runtime_error("band " + band_name(r.band) +
                               " does not align with the leaf grid at this rate/level");
    }
    BandSpec spec;
    spec.band = r.band;
    spec.low_hz = r.lo;
    spec.high_hz = r.hi;
    for (std::size_t f = lo; f < hi; ++f) spec.leaf_indices.push_back(f);
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<double> band_extract(const WpdLeaves& leaves, const BandSpec& spec) {
  const auto perm = frequency_order(leaves.level);
  std::vector<double> out;
  std::size_t previous = 0;
  bool first = true;
  for (std::size_t f : spec.leaf_indices) {
    if (f >= leaves.leaves.size()) throw std::runtime_error("band leaf index out of range");
    if (!first && f <= previous) throw std::runtime_error("band leaf indices must ascend");
    previous = f;
    first = false;
    const auto& leaf = leaves.leaves[perm[f]];
    out.insert(out.end(), leaf.begin(), leaf.end());
  }
  return out;
}

}  // namespace eegrid
