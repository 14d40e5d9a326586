#include "eegrid/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "eegrid/knn.hpp"
#include "eegrid/synthetic.hpp"
#include "eegrid/topomap.hpp"
#include "eegrid/util.hpp"
#include "eegrid/wavelet.hpp"
#include "eegrid/wilcoxon.hpp"

namespace eegrid::selfcheck {

double dft_band_energy_fraction(std::span<const double> x, double sample_rate_hz, double lo_hz,
                                double hi_hz) {
  const std::size_t n = x.size();
  if (n == 0) throw std::runtime_error("dft oracle: empty signal");
  double band = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
      re += x[t] * std::cos(ang);
      im += x[t] * std::sin(ang);
    }
    const double power = re * re + im * im;
    total += power;
    // Bin k corresponds to |frequency| f_k = min(k, n-k) * fs / n.
    const double freq =
        static_cast<double>(std::min(k, n - k)) * sample_rate_hz / static_cast<double>(n);
    if (freq >= lo_hz && freq < hi_hz) band += power;
  }
  if (total == 0.0) return 0.0;
  return band / total;
}

int knn_exhaustive(const std::vector<std::vector<double>>& train_x,
                   const std::vector<int>& train_y, std::span<const double> query, int k) {
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(train_x.size());
  for (std::size_t i = 0; i < train_x.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double diff = train_x[i][j] - query[j];
      d2 += diff * diff;
    }
    all.emplace_back(d2, i);
  }
  std::sort(all.begin(), all.end());
  int votes = 0;
  for (int i = 0; i < k; ++i) votes += train_y[all[static_cast<std::size_t>(i)].second];
  return votes * 2 > k ? 1 : 0;
}

double wilcoxon_enumeration_p(std::span<const double> a, std::span<const double> b) {
  std::vector<double> abs_d;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = abs_d.size();
  if (n == 0) throw std::runtime_error("wilcoxon oracle: no nonzero pairs");
  if (n > 20) throw std::runtime_error("wilcoxon oracle: enumeration capped at n=20");

  // Average ranks of |d|.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return abs_d[i] < abs_d[j]; });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }

  double observed = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (positive[t]) observed += rank[t];
  }

  std::size_t at_least = 0;
  const std::size_t assignments = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < assignments; ++mask) {
    double w = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (mask & (std::size_t{1} << t)) w += rank[t];
    }
    if (w >= observed - 1e-12) ++at_least;
  }
  return static_cast<double>(at_least) / static_cast<double>(assignments);
}

std::vector<std::vector<double>> finite_difference_gradients(const std::function<double()>& loss,
                                                             std::vector<ParamRef>& params,
                                                             double eps) {
  std::vector<std::vector<double>> grads;
  grads.reserve(params.size());
  for (auto& p : params) {
    std::vector<double> g(p.value->size(), 0.0);
    for (std::size_t i = 0; i < p.value->size(); ++i) {
      const double saved = (*p.value)[i];
      (*p.value)[i] = saved + eps;
      const double hi = loss();
      (*p.value)[i] = saved - eps;
      const double lo = loss();
      (*p.value)[i] = saved;
      g[i] = (hi - lo) / (2.0 * eps);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

void randomize_parameters(Network& net, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (auto& p : net.parameters()) {
    for (auto& v : *p.value) v += scale * rng.normal();
  }
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

SuiteResult check_energy_conservation(bool quick) {
  const int trials = quick ? 100 : 500;
  const auto qmf = make_db4();
  Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t len = 16 * (1 + rng.uniform_int(64));  // 16..1024
    std::vector<double> x(len);
    for (auto& v : x) v = rng.normal();
    double in_energy = 0.0;
    for (double v : x) in_energy += v * v;
    const auto leaves = wpd_decompose(x, qmf, 4);
    double out_energy = 0.0;
    for (const auto& leaf : leaves.leaves)
      for (double v : leaf) out_energy += v * v;
    worst = std::max(worst, std::abs(out_energy - in_energy) / in_energy);
  }
  return {"wavelet-energy-conservation", worst < 1e-9, "max relative error " + format_double(worst)};
}

// Every centered tone must land its plurality energy in exactly the
// predicted frequency-ordered leaf. The capture floor is the measured db4
// behavior (bins straddling the 32 Hz half-band split cap near 60%).
SuiteResult check_tone_probe() {
  const auto qmf = make_db4();
  const auto perm = frequency_order(4);
  const double fs = 128.0;
  const std::size_t len = 1024;
  double worst = 1.0;
  bool ordering_ok = true;
  for (std::size_t bin = 0; bin < 16; ++bin) {
    const double freq = (static_cast<double>(bin) + 0.5) * 4.0;  // center of 4 Hz bin
    std::vector<double> x(len);
    for (std::size_t t = 0; t < len; ++t)
      x[t] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) / fs);
    const auto leaves = wpd_decompose(x, qmf, 4);
    double total = 0.0;
    double best = -1.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < leaves.leaves.size(); ++i) {
      double e = 0.0;
      for (double v : leaves.leaves[i]) e += v * v;
      total += e;
      if (e > best) {
        best = e;
        argmax = i;
      }
    }
    if (argmax != perm[bin]) ordering_ok = false;
    double in_leaf = 0.0;
    for (double v : leaves.leaves[perm[bin]]) in_leaf += v * v;
    worst = std::min(worst, in_leaf / total);
  }
  return {"wavelet-tone-probe", ordering_ok && worst >= 0.55,
          "all 16 tones hit their predicted leaf; weakest capture " +
              format_double(100.0 * worst) + "%"};
}

SuiteResult check_interpolation(bool quick) {
  const Montage montage = builtin_montage_sad34();
  const auto proj = project_montage(montage, 15);
  InterpConfig cfg;
  Rng rng(202);
  const int trials = quick ? 100 : 500;
  bool ok = true;
  for (int t = 0; t < trials && ok; ++t) {
    std::vector<double> values(montage.size());
    for (auto& v : values) v = rng.normal() * 10.0;
    const Matrix grid = idw_interpolate(values, proj, cfg);
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto [r, c] = proj.pixel_of[i];
      if (grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) != values[i])
        ok = false;
    }
    for (double v : grid.v) {
      if (v < lo - 1e-12 || v > hi + 1e-12) ok = false;
    }
  }
  return {"idw-exactness-and-bounds", ok,
          ok ? "sensor pixels exact, grid within sensor range" : "violation found"};
}

SuiteResult check_knn_oracle(bool quick) {
  Rng rng(303);
  const int instances = quick ? 20 : 100;
  int mismatches = 0;
  for (int t = 0; t < instances; ++t) {
    const std::size_t n = 20 + rng.uniform_int(40);
    const std::size_t dim = 2 + rng.uniform_int(6);
    std::vector<std::vector<double>> x(n, std::vector<double>(dim));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x[i]) v = rng.normal();
      y[i] = static_cast<int>(rng.uniform_int(2));
    }
    std::vector<double> q(dim);
    for (auto& v : q) v = rng.normal();
    const int k = rng.uniform01() < 0.5 ? 3 : 5;
    if (knn_classify(x, y, q, k) != knn_exhaustive(x, y, q, k)) ++mismatches;
  }
  return {"knn-vs-exhaustive-scan", mismatches == 0,
          std::to_string(mismatches) + " mismatches over " + std::to_string(instances)};
}

SuiteResult check_wilcoxon_oracle(bool quick) {
  Rng rng(404);
  const int trials = quick ? 20 : 100;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 5 + rng.uniform_int(6);  // 5..10 pairs
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = a[i] + rng.normal();
    }
    try {
      const auto res = wilcoxon_signed_rank(a, b);
      const double oracle = wilcoxon_enumeration_p(a, b);
      worst = std::max(worst, std::abs(res.p_one_sided - oracle));
    } catch (const std::runtime_error&) {
      // all-zero or <5 nonzero pairs: both paths reject, nothing to compare
    }
  }
  return {"wilcoxon-vs-enumeration", worst < 1e-12,
          "max p-value difference " + format_double(worst)};
}

SuiteResult check_gradients() {
  NetworkSpec spec;
  spec.input = {4, 4, 2};
  spec.layers = {LayerSpec::batch_norm(), LayerSpec::conv2d(2, 3, 3), LayerSpec::relu(),
                 LayerSpec::flatten(),    LayerSpec::dense(2),        LayerSpec::softmax()};
  Network net(spec);
  net.init_params(505);
  randomize_parameters(net, 506);

  Tensor4 batch(4, spec.input);
  Rng rng(606);
  for (auto& v : batch.v) v = rng.normal();
  const std::vector<int> labels = {0, 1, 1, 0};

  net.loss_and_backward(batch, labels, 777, false);
  auto params = net.parameters();
  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) analytic.push_back(*p.grad);

  auto loss = [&]() { return net.loss(batch, labels, Mode::Train, 777, false); };
  const auto numeric = finite_difference_gradients(loss, params, 1e-5);

  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < analytic[k].size(); ++i) {
      const double denom = std::max({std::abs(analytic[k][i]), std::abs(numeric[k][i]), 1e-6});
      worst = std::max(worst, std::abs(analytic[k][i] - numeric[k][i]) / denom);
    }
  }
  return {"cnn-gradient-check", worst < 1e-4, "max relative error " + format_double(worst)};
}

}  // namespace

std::vector<SuiteResult> run_selftest(bool quick) {
  std::vector<SuiteResult> results;
  results.push_back(check_energy_conservation(quick));
  results.push_back(check_tone_probe());
  results.push_back(check_interpolation(quick));
  results.push_back(check_knn_oracle(quick));
  results.push_back(check_wilcoxon_oracle(quick));
  results.push_back(check_gradients());
  return results;
}

}  // namespace eegrid::selfcheck
