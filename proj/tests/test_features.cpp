#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eegrid/features.hpp"
#include "eegrid/util.hpp"

using namespace eegrid;

namespace {

WindowSegment random_window(std::size_t channels, std::size_t length, std::uint64_t seed) {
  WindowSegment w;
  w.subject_id = "s01";
  w.trial_id = "rest";
  w.window_index = 3;
  w.label = 1;
  w.data = Matrix(channels, length);
  Rng rng(seed);
  for (auto& x : w.data.v) x = rng.normal();
  return w;
}

}  // namespace

TEST_CASE("mean band energy is the mean squared coefficient") {
  CHECK(mean_band_energy(std::vector<double>{2.0, 2.0}) == doctest::Approx(4.0));
  CHECK(mean_band_energy(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(mean_band_energy(std::vector<double>{3.0}) == doctest::Approx(9.0));
  CHECK_THROWS(mean_band_energy(std::vector<double>{}));
}

TEST_CASE("relative energies normalize to one") {
  const auto q = relative_energies(std::vector<double>{1.0, 1.0, 2.0});
  CHECK(q[0] == doctest::Approx(0.25));
  CHECK(q[1] == doctest::Approx(0.25));
  CHECK(q[2] == doctest::Approx(0.5));
  CHECK(relative_energies(std::vector<double>{5.0}) == std::vector<double>{1.0});
  CHECK_THROWS_WITH_AS(relative_energies(std::vector<double>{0.0, 0.0}),
                       doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("relative energies sum to one for random inputs") {
  Rng rng(17);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> e(1 + rng.uniform_int(8));
    for (auto& x : e) x = rng.uniform01() * 10.0;
    e[rng.uniform_int(e.size())] += 1e-6;  // keep at least one band positive
    const auto q = relative_energies(e);
    double sum = 0.0;
    for (double v : q) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("wavelet entropy follows -q ln q with the zero convention") {
  const auto w = wavelet_entropy(std::vector<double>{1.0, 0.0, 1.0 / std::numbers::e_v<double>});
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.0);
  CHECK(w[2] == doctest::Approx(1.0 / std::numbers::e_v<double>).epsilon(1e-12));
  CHECK_THROWS(wavelet_entropy(std::vector<double>{1.2}));
  CHECK_THROWS(wavelet_entropy(std::vector<double>{-0.1}));
}

TEST_CASE("model-1 matrices have the published shapes") {
  const auto qmf = make_db4();
  SUBCASE("sad energy-only is 34x5") {
    const auto m = model1_matrix(random_window(34, 640, 1), make_band_specs(128.0, 4, true),
                                 false, qmf);
    CHECK(m.data.rows == 34);
    CHECK(m.data.cols == 5);
    CHECK(m.feature_layout ==
          std::vector<std::string>{"energy:delta", "energy:theta", "energy:alpha", "energy:beta",
                                   "energy:gamma"});
  }
  SUBCASE("sad energy+entropy is 34x10") {
    const auto m =
        model1_matrix(random_window(34, 640, 2), make_band_specs(128.0, 4, true), true, qmf);
    CHECK(m.data.rows == 34);
    CHECK(m.data.cols == 10);
  }
  SUBCASE("deap energy+entropy is 32x8") {
    const auto m =
        model1_matrix(random_window(32, 512, 3), make_band_specs(128.0, 4, false), true, qmf);
    CHECK(m.data.rows == 32);
    CHECK(m.data.cols == 8);
    CHECK(m.feature_layout.front() == "energy:theta");
    CHECK(m.feature_layout.back() == "entropy:gamma");
  }
}

TEST_CASE("model-1 provenance carries through") {
  const auto qmf = make_db4();
  const auto m =
      model1_matrix(random_window(4, 320, 4), make_band_specs(128.0, 4, true), true, qmf);
  CHECK(m.info.subject_id == "s01");
  CHECK(m.info.trial_id == "rest");
  CHECK(m.info.window_index == 3);
  CHECK(m.info.label == 1);
}

TEST_CASE("per-channel relative energies and entropies satisfy the identities") {
  const auto qmf = make_db4();
  const auto bands = make_band_specs(128.0, 4, true);
  const WindowSegment w = random_window(6, 640, 5);
  for (std::size_t ch = 0; ch < 6; ++ch) {
    const auto leaves = wpd_decompose(w.data.row(ch), qmf, 4);
    const BandFeatures f = compute_band_features(leaves, bands);
    double qsum = 0.0;
    double wsum = 0.0;
    for (double q : f.relative_energy) qsum += q;
    for (double v : f.entropy) {
      CHECK(v >= 0.0);
      wsum += v;
    }
    CHECK(std::abs(qsum - 1.0) <= 1e-12);
    CHECK(wsum <= std::log(5.0) + 1e-12);  // total entropy bounded by ln(bands)
    double etot = 0.0;
    for (double e : f.mean_energy) etot += e;
    CHECK(f.total_energy == doctest::Approx(etot));
  }
}

TEST_CASE("energy scales quadratically and entropy features are scale-invariant") {
  const auto qmf = make_db4();
  const auto bands = make_band_specs(128.0, 4, true);
  WindowSegment w = random_window(3, 320, 6);
  const auto base = model1_matrix(w, bands, true, qmf);
  WindowSegment scaled = w;
  for (auto& x : scaled.data.v) x *= 3.0;
  const auto big = model1_matrix(scaled, bands, true, qmf);
  for (std::size_t r = 0; r < base.data.rows; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {  // energy columns scale by 9
      CHECK(big.data.at(r, c) == doctest::Approx(9.0 * base.data.at(r, c)).epsilon(1e-9));
    }
    for (std::size_t c = 5; c < 10; ++c) {  // entropy columns unchanged
      CHECK(big.data.at(r, c) == doctest::Approx(base.data.at(r, c)).epsilon(1e-9));
    }
  }
}

TEST_CASE("window length must divide by 16") {
  const auto qmf = make_db4();
  CHECK_THROWS(model1_matrix(random_window(2, 100, 7), make_band_specs(128.0, 4, true), true, qmf));
}
