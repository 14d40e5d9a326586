#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "eegrid/synthetic.hpp"
#include "eegrid/topomap.hpp"
#include "eegrid/util.hpp"

using namespace eegrid;

namespace {

Montage single_sensor(double x, double y) {
  Montage m;
  m.names = {"Cz"};
  m.positions = {{x, y}};
  return m;
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal() * 5.0;
  return v;
}

}  // namespace

TEST_CASE("projection maps corners and centers as specified") {
  Montage m;
  m.names = {"corner", "center"};
  m.positions = {{0.0, 0.0}, {0.5, 0.5}};
  const auto proj = project_montage(m, 15);
  CHECK(proj.pixel_of[0] == std::pair<int, int>{0, 0});
  CHECK(proj.pixel_of[1] == std::pair<int, int>{7, 7});
}

TEST_CASE("the 34-electrode montage projects to 34 distinct pixels at K=15") {
  const auto proj = project_montage(builtin_montage_sad34(), 15);
  std::set<std::pair<int, int>> pixels(proj.pixel_of.begin(), proj.pixel_of.end());
  CHECK(pixels.size() == 34);
}

TEST_CASE("colliding electrodes raise an explicit error") {
  Montage m;
  m.names = {"A", "B"};
  m.positions = {{0.5, 0.5}, {0.51, 0.5}};  // both round to pixel (7,7) at K=15
  CHECK_THROWS_WITH_AS(project_montage(m, 15), doctest::Contains("collide"), std::runtime_error);
  CHECK_THROWS(project_montage(builtin_montage_sad34(), 3));  // K too small
}

TEST_CASE("idw reproduces constants and exact direct arithmetic") {
  const Montage montage = builtin_montage_sad34();
  const auto proj = project_montage(montage, 15);
  InterpConfig cfg;

  SUBCASE("constant sensors give a constant grid, border rule included") {
    const Matrix grid = idw_interpolate(std::vector<double>(34, 3.25), proj, cfg);
    for (double v : grid.v) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
  }

  SUBCASE("two in-radius sensors at distances 1 and 2 with values 0 and 3 give 1") {
    //   w = 1/1 and 1/2; (1*0 + 0.5*3)/(1.5) = 1
    Montage two;
    two.names = {"A", "B"};
    // pixel grid: A at (7,6), B at (7,9); probe pixel (7,7): d(A)=1, d(B)=2
    two.positions = {{6.0 / 14, 0.5}, {9.0 / 14, 0.5}};
    const auto p2 = project_montage(two, 15);
    InterpConfig wide;
    wide.d_max = 2.5;
    const Matrix grid = idw_interpolate({0.0, 3.0}, p2, wide);
    CHECK(grid.at(7, 7) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("single sensor with nearest-border fill covers the whole grid") {
    const auto p1 = project_montage(single_sensor(0.5, 0.5), 15);
    const Matrix grid = idw_interpolate({2.5}, p1, cfg);
    for (double v : grid.v) CHECK(v == 2.5);
  }

  SUBCASE("zero-border fill leaves far pixels at zero") {
    InterpConfig zero_cfg;
    zero_cfg.method = InterpMethod::IdwZeroBorder;
    const auto p1 = project_montage(single_sensor(0.0, 0.0), 15);
    const Matrix grid = idw_interpolate({2.5}, p1, zero_cfg);
    CHECK(grid.at(0, 0) == 2.5);
    CHECK(grid.at(14, 14) == 0.0);
  }
}

TEST_CASE("idw exactness, bounds, and monotone response") {
  const Montage montage = builtin_montage_sad34();
  const auto proj = project_montage(montage, 15);
  InterpConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto values = random_values(34, seed);
    const Matrix grid = idw_interpolate(values, proj, cfg);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto [r, c] = proj.pixel_of[i];
      CHECK(grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) == values[i]);
    }
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    for (double v : grid.v) {
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
  // raising one sensor's value never lowers any pixel
  const auto values = random_values(34, 99);
  const Matrix before = idw_interpolate(values, proj, cfg);
  auto raised = values;
  raised[10] += 2.0;
  const Matrix after = idw_interpolate(raised, proj, cfg);
  for (std::size_t i = 0; i < before.v.size(); ++i) CHECK(after.v[i] >= before.v[i] - 1e-12);
}

TEST_CASE("classic methods reproduce constants and pin sensors") {
  const Montage montage = builtin_montage_sad34();
  const auto proj = project_montage(montage, 15);
  for (InterpMethod method :
       {InterpMethod::Nearest, InterpMethod::Bilinear, InterpMethod::CubicBSpline}) {
    InterpConfig cfg;
    cfg.method = method;
    const Matrix constant = classic_interpolate(std::vector<double>(34, -1.5), proj, cfg);
    for (double v : constant.v) CHECK(v == doctest::Approx(-1.5).epsilon(1e-12));

    const auto values = random_values(34, 7);
    const Matrix grid = classic_interpolate(values, proj, cfg);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto [r, c] = proj.pixel_of[i];
      CHECK(grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) == values[i]);
    }
  }
  // nearest with one sensor is constant
  const auto p1 = project_montage(single_sensor(0.3, 0.6), 15);
  InterpConfig cfg;
  cfg.method = InterpMethod::Nearest;
  const Matrix grid = classic_interpolate({4.0}, p1, cfg);
  for (double v : grid.v) CHECK(v == 4.0);
}

TEST_CASE("mirroring montage x-coordinates mirrors the grid columns") {
  const Montage montage = builtin_montage_sad34();
  Montage mirrored = montage;
  for (auto& [x, y] : mirrored.positions) x = 1.0 - x;
  const auto proj = project_montage(montage, 15);
  const auto proj_m = project_montage(mirrored, 15);
  const auto values = random_values(34, 5);
  InterpConfig cfg;
  const Matrix a = idw_interpolate(values, proj, cfg);
  const Matrix b = idw_interpolate(values, proj_m, cfg);
  for (std::size_t r = 0; r < 15; ++r)
    for (std::size_t c = 0; c < 15; ++c)
      CHECK(a.at(r, c) == doctest::Approx(b.at(r, 14 - c)).epsilon(1e-12));
}

TEST_CASE("model-2 tensors stack per-feature slices with exact sensor pixels") {
  const Montage montage = builtin_montage_sad34();
  const auto proj = project_montage(montage, 15);
  InterpConfig cfg;

  FeatureMatrix fm;
  fm.data = Matrix(34, 10);
  Rng rng(31);
  for (auto& v : fm.data.v) v = rng.uniform01();
  fm.feature_layout.assign(10, "f");
  fm.info = {"s02", "rest", 4, 1};

  const FeatureGrid grid = model2_tensor(fm, proj, cfg);
  CHECK(grid.data.d0 == 15);
  CHECK(grid.data.d1 == 15);
  CHECK(grid.data.d2 == 10);
  CHECK(grid.info == fm.info);
  for (std::size_t ch = 0; ch < 34; ++ch) {
    const auto [r, c] = proj.pixel_of[ch];
    for (std::size_t b = 0; b < 10; ++b) {
      CHECK(grid.data.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), b) ==
            fm.data.at(ch, b));
    }
  }
}

TEST_CASE("slice dumps are writable") {
  Matrix slice(15, 15);
  Rng rng(77);
  for (auto& v : slice.v) v = rng.normal();
  const auto dir = std::filesystem::temp_directory_path() / "eegrid_test_topomap";
  std::filesystem::create_directories(dir);
  write_slice_pgm(slice, dir / "slice.pgm");
  write_slice_csv(slice, dir / "slice.csv");
  CHECK(std::filesystem::file_size(dir / "slice.pgm") > 0);
  CHECK(std::filesystem::file_size(dir / "slice.csv") > 0);
}
