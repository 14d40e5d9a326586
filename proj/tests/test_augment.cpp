#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eegrid/augment.hpp"
#include "eegrid/util.hpp"

using namespace eegrid;

namespace {

FeatureMatrix make_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, int label = 1) {
  FeatureMatrix m;
  m.data = Matrix(rows, cols);
  Rng rng(seed);
  for (auto& v : m.data.v) v = rng.normal();
  m.feature_layout.assign(cols, "f");
  m.info = {"s01", "rest", 0, label};
  return m;
}

FeatureGrid make_grid(std::size_t k, std::size_t bands, std::uint64_t seed, int label = 0) {
  FeatureGrid g;
  g.data = Tensor3(k, k, bands);
  Rng rng(seed);
  for (auto& v : g.data.v) v = rng.normal();
  g.feature_layout.assign(bands, "f");
  g.info = {"s02", "rest", 1, label};
  return g;
}

}  // namespace

TEST_CASE("model-1 row shift replicates the adjacent surviving row") {
  FeatureMatrix m = make_matrix(3, 2, 1);
  SUBCASE("dy = 0 is the identity") {
    const FeatureMatrix s = shift_model1(m, 0);
    CHECK(s.data == m.data);
  }
  SUBCASE("dy = +1 gives [r0, r0, r1]") {
    const FeatureMatrix s = shift_model1(m, 1);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(s.data.at(0, c) == m.data.at(0, c));
      CHECK(s.data.at(1, c) == m.data.at(0, c));
      CHECK(s.data.at(2, c) == m.data.at(1, c));
    }
  }
  SUBCASE("dy = -1 gives [r1, r2, r2]") {
    const FeatureMatrix s = shift_model1(m, -1);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(s.data.at(0, c) == m.data.at(1, c));
      CHECK(s.data.at(1, c) == m.data.at(2, c));
      CHECK(s.data.at(2, c) == m.data.at(2, c));
    }
  }
  SUBCASE("shape and label are preserved for all legal shifts") {
    for (int dy = -2; dy <= 2; ++dy) {
      const FeatureMatrix s = shift_model1(m, dy);
      CHECK(s.data.rows == 3);
      CHECK(s.data.cols == 2);
      CHECK(s.info.label == m.info.label);
    }
  }
  SUBCASE("|dy| >= M is rejected") { CHECK_THROWS(shift_model1(m, 3)); }
}

TEST_CASE("model-2 shifts move every band slice identically") {
  FeatureGrid g = make_grid(5, 3, 2);
  SUBCASE("(0,0) is the identity") {
    const FeatureGrid s = shift_model2(g, 0, 0);
    CHECK(s.data == g.data);
  }
  SUBCASE("constant slice is unchanged under any legal shift") {
    FeatureGrid constant = make_grid(5, 2, 3);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 5; ++c)
        for (std::size_t b = 0; b < 2; ++b)
          constant.data.at(r, c, b) = static_cast<double>(b);
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        const FeatureGrid s = shift_model2(constant, dy, dx);
        CHECK(s.data == constant.data);
      }
    }
  }
  SUBCASE("band slices share the offset") {
    // slice b is the constant b; shifting must keep each slice equal to b
    FeatureGrid banded = make_grid(6, 4, 4);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t b = 0; b < 4; ++b) banded.data.at(r, c, b) = static_cast<double>(b);
    const FeatureGrid s = shift_model2(banded, 2, -1);
    CHECK(s.data == banded.data);
  }
  SUBCASE("interior pixels are translated") {
    const FeatureGrid s = shift_model2(g, 1, 2);
    for (std::size_t r = 1; r < 5; ++r)
      for (std::size_t c = 2; c < 5; ++c)
        for (std::size_t b = 0; b < 3; ++b)
          CHECK(s.data.at(r, c, b) == g.data.at(r - 1, c - 2, b));
  }
  SUBCASE("shift then unshift differs only in the replicated border") {
    const FeatureGrid back = shift_model2(shift_model2(g, 1, 1), -1, -1);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t b = 0; b < 3; ++b) CHECK(back.data.at(r, c, b) == g.data.at(r, c, b));
  }
  SUBCASE("out-of-range shifts are rejected") { CHECK_THROWS(shift_model2(g, 3, 0)); }
}

TEST_CASE("augment plans validate their shape") {
  AugmentPlan plan = AugmentPlan::one_pixel(AugmentTarget::Model1);
  CHECK(plan.shifts.size() == 5);
  plan.validate();
  CHECK(AugmentPlan::one_and_two_pixels(AugmentTarget::Model2).shifts.size() == 9);

  AugmentPlan bad{{{1, 0}}, AugmentTarget::Model1};  // no identity
  CHECK_THROWS(bad.validate());
  AugmentPlan too_far{{{0, 0}, {3, 0}}, AugmentTarget::Model1};
  CHECK_THROWS(too_far.validate());
}

TEST_CASE("expansion multiplies the sample count and preserves labels") {
  std::vector<FeatureMatrix> samples;
  for (int i = 0; i < 100; ++i) samples.push_back(make_matrix(4, 3, 10 + i, i % 2));
  const auto plan = AugmentPlan::one_pixel(AugmentTarget::Model1);
  const auto out = expand_training_set(samples, plan);
  CHECK(out.size() == 500);

  long ones_in = 0, ones_out = 0;
  for (const auto& s : samples) ones_in += s.info.label;
  for (const auto& s : out) ones_out += s.info.label;
  CHECK(ones_out == 5 * ones_in);  // class ratio preserved exactly

  // provenance (and hence fold identity) copied from the source
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].info.subject_id == samples[i / 5].info.subject_id);
    CHECK(out[i].info.window_index == samples[i / 5].info.window_index);
  }
}

TEST_CASE("expansion rejects plans for the wrong model") {
  std::vector<FeatureMatrix> m1{make_matrix(4, 3, 1)};
  std::vector<FeatureGrid> m2{make_grid(5, 2, 2)};
  CHECK_THROWS(expand_training_set(m1, AugmentPlan::one_pixel(AugmentTarget::Model2)));
  CHECK_THROWS(expand_training_set(m2, AugmentPlan::one_pixel(AugmentTarget::Model1)));
  CHECK(expand_training_set(m2, AugmentPlan::one_and_two_pixels(AugmentTarget::Model2)).size() ==
        9);
}
