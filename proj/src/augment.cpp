#include "eegrid/augment.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace eegrid {

namespace {

std::size_t clamp_index(long long i, std::size_t n) {
  if (i < 0) return 0;
  if (i >= static_cast<long long>(n)) return n - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace

AugmentPlan AugmentPlan::none(AugmentTarget target) {
  return {{{0, 0}}, target};
}

AugmentPlan AugmentPlan::one_pixel(AugmentTarget target) {
  return {{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}, target};
}

AugmentPlan AugmentPlan::one_and_two_pixels(AugmentTarget target) {
  return {{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {2, 0}, {-2, 0}, {0, 2}, {0, -2}}, target};
}

void AugmentPlan::validate() const {
  bool has_identity = false;
  for (const auto& [dy, dx] : shifts) {
    if (std::abs(dy) > 2 || std::abs(dx) > 2)
      throw std::runtime_error("augment shift exceeds 2 pixels");
    if (dy == 0 && dx == 0) has_identity = true;
  }
  if (!has_identity) throw std::runtime_error("augment plan must retain the original (0,0)");
}

FeatureMatrix shift_model1(const FeatureMatrix& m, int dy) {
  if (static_cast<std::size_t>(std::abs(dy)) >= m.data.rows)
    throw std::runtime_error("row shift magnitude must be smaller than the row count");
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < m.data.rows; ++r) {
    const std::size_t src = clamp_index(static_cast<long long>(r) - dy, m.data.rows);
    for (std::size_t c = 0; c < m.data.cols; ++c) out.data.at(r, c) = m.data.at(src, c);
  }
  return out;
}

namespace {

// Column shift with the same replication rule, used when a plan moves a
// model-1 matrix along the feature axis.
FeatureMatrix shift_model1_cols(const FeatureMatrix& m, int dx) {
  if (static_cast<std::size_t>(std::abs(dx)) >= m.data.cols)
    throw std::runtime_error("column shift magnitude must be smaller than the column count");
  FeatureMatrix out = m;
  for (std::size_t c = 0; c < m.data.cols; ++c) {
    const std::size_t src = clamp_index(static_cast<long long>(c) - dx, m.data.cols);
    for (std::size_t r = 0; r < m.data.rows; ++r) out.data.at(r, c) = m.data.at(r, src);
  }
  return out;
}

}  // namespace

FeatureGrid shift_model2(const FeatureGrid& g, int dy, int dx) {
  if (std::abs(dy) > 2 || std::abs(dx) > 2)
    throw std::runtime_error("model-2 shifts are limited to 2 pixels");
  FeatureGrid out = g;
  for (std::size_t r = 0; r < g.data.d0; ++r) {
    const std::size_t sr = clamp_index(static_cast<long long>(r) - dy, g.data.d0);
    for (std::size_t c = 0; c < g.data.d1; ++c) {
      const std::size_t sc = clamp_index(static_cast<long long>(c) - dx, g.data.d1);
      for (std::size_t b = 0; b < g.data.d2; ++b) out.data.at(r, c, b) = g.data.at(sr, sc, b);
    }
  }
  return out;
}

std::vector<FeatureMatrix> expand_training_set(const std::vector<FeatureMatrix>& samples,
                                               const AugmentPlan& plan) {
  if (plan.apply_to != AugmentTarget::Model1)
    throw std::runtime_error("augment plan targets model 2 but samples are model 1");
  plan.validate();
  std::vector<FeatureMatrix> out;
  out.reserve(samples.size() * plan.shifts.size());
  for (const auto& s : samples) {
    for (const auto& [dy, dx] : plan.shifts) {
      FeatureMatrix shifted = (dy == 0) ? s : shift_model1(s, dy);
      if (dx != 0) shifted = shift_model1_cols(shifted, dx);
      out.push_back(std::move(shifted));
    }
  }
  return out;
}

std::vector<FeatureGrid> expand_training_set(const std::vector<FeatureGrid>& samples,
                                             const AugmentPlan& plan) {
  if (plan.apply_to != AugmentTarget::Model2)
    throw std::runtime_error("augment plan targets model 1 but samples are model 2");
  plan.validate();
  std::vector<FeatureGrid> out;
  out.reserve(samples.size() * plan.shifts.size());
  for (const auto& s : samples) {
    for (const auto& [dy, dx] : plan.shifts) out.push_back(shift_model2(s, dy, dx));
  }
  return out;
}

}  // namespace eegrid
