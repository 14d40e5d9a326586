#include "eegrid/features.hpp"

#include <cmath>
#include <stdexcept>

namespace eegrid {

double mean_band_energy(std::span<const double> coeffs) {
  if (coeffs.empty()) throw std::runtime_error("mean_band_energy: empty coefficient vector");
  double sum = 0.0;
  for (double c : coeffs) sum += c * c;
  return sum / static_cast<double>(coeffs.size());
}

std::vector<double> relative_energies(std::span<const double> band_energies) {
  double total = 0.0;
  for (double e : band_energies) {
    if (e < 0.0) throw std::runtime_error("relative_energies: negative band energy");
    total += e;
  }
  if (total <= 0.0)
    throw std::runtime_error("relative_energies: all band energies are zero (degenerate window)");
  std::vector<double> q(band_energies.size());
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = band_energies[j] / total;
  return q;
}

std::vector<double> wavelet_entropy(std::span<const double> q) {
  std::vector<double> w(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] < 0.0 || q[j] > 1.0)
      throw std::runtime_error("wavelet_entropy: relative energy outside [0,1]");
    w[j] = (q[j] == 0.0) ? 0.0 : -q[j] * std::log(q[j]);
  }
  return w;
}

BandFeatures compute_band_features(const WpdLeaves& leaves, const std::vector<BandSpec>& bands) {
  BandFeatures out;
  out.mean_energy.reserve(bands.size());
  for (const auto& spec : bands) {
    const auto coeffs = band_extract(leaves, spec);
    out.mean_energy.push_back(mean_band_energy(coeffs));
  }
  for (double e : out.mean_energy) out.total_energy += e;
  out.relative_energy = relative_energies(out.mean_energy);
  out.entropy = wavelet_entropy(out.relative_energy);
  return out;
}

std::vector<std::string> feature_layout_names(const std::vector<BandSpec>& bands,
                                              bool include_entropy) {
  std::vector<std::string> names;
  for (const auto& spec : bands) names.push_back("energy:" + band_name(spec.band));
  if (include_entropy) {
    for (const auto& spec : bands) names.push_back("entropy:" + band_name(spec.band));
  }
  return names;
}

FeatureMatrix model1_matrix(const WindowSegment& window, const std::vector<BandSpec>& bands,
                            bool include_entropy, const QmfPair& qmf) {
  if (bands.empty()) throw std::runtime_error("model1_matrix: no bands");
  const std::size_t m = window.data.rows;
  const std::size_t b = bands.size() * (include_entropy ? 2 : 1);

  FeatureMatrix out;
  out.data = Matrix(m, b);
  out.feature_layout = feature_layout_names(bands, include_entropy);
  out.info = {window.subject_id, window.trial_id, window.window_index, window.label};

  for (std::size_t ch = 0; ch < m; ++ch) {
    const auto leaves = wpd_decompose(window.data.row(ch), qmf, 4);
    const auto feats = compute_band_features(leaves, bands);
    for (std::size_t j = 0; j < bands.size(); ++j) out.data.at(ch, j) = feats.mean_energy[j];
    if (include_entropy) {
      for (std::size_t j = 0; j < bands.size(); ++j)
        out.data.at(ch, bands.size() + j) = feats.entropy[j];
    }
  }
  return out;
}

}  // namespace eegrid
