#pragma once

#include <utility>
#include <vector>

#include "eegrid/features.hpp"
#include "eegrid/topomap.hpp"

namespace eegrid {

enum class AugmentTarget { Model1, Model2 };

// Label-preserving spatial shifts applied to training samples. (0, 0) is
// always present so the original sample is retained.
struct AugmentPlan {
  std::vector<std::pair<int, int>> shifts;  // (dy, dx)
  AugmentTarget apply_to{AugmentTarget::Model1};

  // Identity only.
  static AugmentPlan none(AugmentTarget target);
  // Axis-aligned shifts of 1 pixel: (0,0), (+-1,0), (0,+-1).
  static AugmentPlan one_pixel(AugmentTarget target);
  // Adds the +-2 axis-aligned shifts, 9 entries total.
  static AugmentPlan one_and_two_pixels(AugmentTarget target);

  void validate() const;  // (0,0) present, every |dy|,|dx| <= 2
};

// Shifts rows by dy; vacated rows replicate the adjacent surviving row.
// [r0,r1,r2] with dy=+1 becomes [r0,r0,r1].
FeatureMatrix shift_model1(const FeatureMatrix& m, int dy);

// Shifts every band slice by (dy, dx) identically with edge replication;
// the band dimension is untouched.
FeatureGrid shift_model2(const FeatureGrid& g, int dy, int dx);

// One output sample per (input sample, plan shift); labels and provenance
// are copied from the source. Callers apply this to training folds only.
std::vector<FeatureMatrix> expand_training_set(const std::vector<FeatureMatrix>& samples,
                                               const AugmentPlan& plan);
std::vector<FeatureGrid> expand_training_set(const std::vector<FeatureGrid>& samples,
                                             const AugmentPlan& plan);

}  // namespace eegrid
