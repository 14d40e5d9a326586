#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "eegrid/features.hpp"
#include "eegrid/matrix.hpp"
#include "eegrid/recording.hpp"

namespace eegrid {

// Electrode-to-pixel assignment on a K x K grid:
// pixel = (round(y * (K-1)), round(x * (K-1))). Collisions are an error.
struct SensorProjection {
  int grid_size{0};
  std::vector<std::string> channels;          // montage order
  std::vector<std::pair<int, int>> pixel_of;  // (row, col) per channel
  std::vector<bool> occupied;                 // K*K mask

  bool is_sensor(int row, int col) const {
    return occupied[static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_size) +
                    static_cast<std::size_t>(col)];
  }
};

enum class InterpMethod { IdwNearestBorder, IdwZeroBorder, Nearest, Bilinear, CubicBSpline };

std::string interp_method_name(InterpMethod m);
InterpMethod interp_method_from_name(const std::string& name);

struct InterpConfig {
  InterpMethod method{InterpMethod::IdwNearestBorder};
  double d_max{3.0};      // pixel units
  double idw_power{1.0};  // weight = 1 / d^power
};

// Model-2 sample: stack of B interpolated K x K slices.
struct FeatureGrid {
  Tensor3 data;  // K x K x B
  std::vector<std::string> feature_layout;
  SampleInfo info;
};

SensorProjection project_montage(const Montage& montage, int grid_size);

// Inverse distance weighting per the border rule: pixels with at least one
// sensor within d_max get the weighted average with w_i = 1/d^power; sensor
// pixels copy their value exactly; the rest ("border points") take the
// nearest sensor's value (IdwNearestBorder) or 0 (IdwZeroBorder).
Matrix idw_interpolate(const std::vector<double>& values, const SensorProjection& proj,
                       const InterpConfig& cfg);

// Nearest assigns each pixel its closest sensor's value (distance ties break
// toward the lowest channel index). Bilinear and CubicBSpline start from the
// nearest fill, apply separable linear/cubic B-spline smoothing with edge
// replication, and re-pin sensor pixels to their exact values.
Matrix classic_interpolate(const std::vector<double>& values, const SensorProjection& proj,
                           const InterpConfig& cfg);

// Dispatches on cfg.method. `values` is aligned with proj.channels.
Matrix interpolate(const std::vector<double>& values, const SensorProjection& proj,
                   const InterpConfig& cfg);
Matrix interpolate(const std::map<std::string, double>& values, const SensorProjection& proj,
                   const InterpConfig& cfg);

// Interpolates every feature column of the model-1 matrix into a grid slice.
// Rows of `features` must follow proj.channels order.
FeatureGrid model2_tensor(const FeatureMatrix& features, const SensorProjection& proj,
                          const InterpConfig& cfg);

// Inspection dumps of a single slice.
void write_slice_pgm(const Matrix& slice, const std::filesystem::path& path);
void write_slice_csv(const Matrix& slice, const std::filesystem::path& path);

}  // namespace eegrid
