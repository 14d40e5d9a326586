#include "eegrid/topomap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace eegrid {

namespace {

double pixel_distance(int r0, int c0, int r1, int c1) {
  const double dr = static_cast<double>(r0 - r1);
  const double dc = static_cast<double>(c0 - c1);
  return std::sqrt(dr * dr + dc * dc);
}

// Index of the sensor closest to (row, col); ties break toward the lowest
// channel index.
std::size_t nearest_sensor(const SensorProjection& proj, int row, int col) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < proj.pixel_of.size(); ++i) {
    const double d = pixel_distance(row, col, proj.pixel_of[i].first, proj.pixel_of[i].second);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void check_values(const std::vector<double>& values, const SensorProjection& proj) {
  if (proj.channels.empty()) throw std::runtime_error("interpolation needs at least one sensor");
  if (values.size() != proj.channels.size())
    throw std::runtime_error("sensor value count does not match projection");
}

// Separable smoothing pass with edge replication.
Matrix separable_smooth(const Matrix& in, const std::vector<double>& kernel) {
  const int k = static_cast<int>(in.rows);
  const int half = static_cast<int>(kernel.size()) / 2;
  auto clamp_idx = [k](int i) { return std::clamp(i, 0, k - 1); };

  Matrix tmp(in.rows, in.cols);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      double acc = 0.0;
      for (int j = 0; j < static_cast<int>(kernel.size()); ++j)
        acc += kernel[static_cast<std::size_t>(j)] *
               in.at(static_cast<std::size_t>(r), static_cast<std::size_t>(clamp_idx(c + j - half)));
      tmp.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
    }
  }
  Matrix out(in.rows, in.cols);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      double acc = 0.0;
      for (int j = 0; j < static_cast<int>(kernel.size()); ++j)
        acc += kernel[static_cast<std::size_t>(j)] *
               tmp.at(static_cast<std::size_t>(clamp_idx(r + j - half)), static_cast<std::size_t>(c));
      out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
    }
  }
  return out;
}

}  // namespace

std::string interp_method_name(InterpMethod m) {
  switch (m) {
    case InterpMethod::IdwNearestBorder: return "idw_nearest_border";
    case InterpMethod::IdwZeroBorder: return "idw_zero_border";
    case InterpMethod::Nearest: return "nearest";
    case InterpMethod::Bilinear: return "bilinear";
    case InterpMethod::CubicBSpline: return "cubic_bspline";
  }
  return "idw_nearest_border";
}

InterpMethod interp_method_from_name(const std::string& name) {
  if (name == "idw_nearest_border") return InterpMethod::IdwNearestBorder;
  if (name == "idw_zero_border") return InterpMethod::IdwZeroBorder;
  if (name == "nearest") return InterpMethod::Nearest;
  if (name == "bilinear") return InterpMethod::Bilinear;
  if (name == "cubic_bspline") return InterpMethod::CubicBSpline;
  throw std::runtime_error("unknown interpolation method '" + name + "'");
}

SensorProjection project_montage(const Montage& montage, int grid_size) {
  if (grid_size < 4) throw std::runtime_error("grid size must be >= 4");
  SensorProjection proj;
  proj.grid_size = grid_size;
  proj.channels = montage.names;
  proj.occupied.assign(static_cast<std::size_t>(grid_size) * static_cast<std::size_t>(grid_size),
                       false);
  for (std::size_t i = 0; i < montage.size(); ++i) {
    const auto [x, y] = montage.positions[i];
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
      throw std::runtime_error("electrode '" + montage.names[i] +
                               "' has coordinates outside [0,1]");
    const int col = static_cast<int>(std::lround(x * (grid_size - 1)));
    const int row = static_cast<int>(std::lround(y * (grid_size - 1)));
    const std::size_t flat =
        static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_size) +
        static_cast<std::size_t>(col);
    if (proj.occupied[flat]) {
      std::string other;
      for (std::size_t j = 0; j < i; ++j) {
        if (proj.pixel_of[j] == std::make_pair(row, col)) other = proj.channels[j];
      }
      throw std::runtime_error("electrodes '" + other + "' and '" + montage.names[i] +
                               "' collide at pixel (" + std::to_string(row) + "," +
                               std::to_string(col) + "); montage too dense for K=" +
                               std::to_string(grid_size));
    }
    proj.occupied[flat] = true;
    proj.pixel_of.emplace_back(row, col);
  }
  return proj;
}

Matrix idw_interpolate(const std::vector<double>& values, const SensorProjection& proj,
                       const InterpConfig& cfg) {
  check_values(values, proj);
  if (cfg.method != InterpMethod::IdwNearestBorder && cfg.method != InterpMethod::IdwZeroBorder)
    throw std::runtime_error("idw_interpolate requires an IDW method");
  if (cfg.d_max <= 0.0) throw std::runtime_error("d_max must be positive");

  const int k = proj.grid_size;
  Matrix grid(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      double wsum = 0.0;
      double acc = 0.0;
      bool exact = false;
      double exact_value = 0.0;
      bool any_in_radius = false;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = pixel_distance(r, c, proj.pixel_of[i].first, proj.pixel_of[i].second);
        if (d == 0.0) {  // sensor pixel: copy, weight would be infinite
          exact = true;
          exact_value = values[i];
          break;
        }
        if (d <= cfg.d_max) {
          const double w = 1.0 / std::pow(d, cfg.idw_power);
          wsum += w;
          acc += w * values[i];
          any_in_radius = true;
        }
      }
      double v;
      if (exact) {
        v = exact_value;
      } else if (any_in_radius) {
        v = acc / wsum;
      } else if (cfg.method == InterpMethod::IdwNearestBorder) {
        v = values[nearest_sensor(proj, r, c)];
      } else {
        v = 0.0;
      }
      grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = v;
    }
  }
  return grid;
}

Matrix classic_interpolate(const std::vector<double>& values, const SensorProjection& proj,
                           const InterpConfig& cfg) {
  check_values(values, proj);
  const int k = proj.grid_size;

  Matrix grid(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c)
      grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          values[nearest_sensor(proj, r, c)];
  if (cfg.method == InterpMethod::Nearest) return grid;

  std::vector<double> kernel;
  if (cfg.method == InterpMethod::Bilinear) {
    kernel = {0.25, 0.5, 0.25};
  } else if (cfg.method == InterpMethod::CubicBSpline) {
    kernel = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  } else {
    throw std::runtime_error("classic_interpolate requires nearest/bilinear/cubic_bspline");
  }
  Matrix smoothed = separable_smooth(grid, kernel);
  for (std::size_t i = 0; i < values.size(); ++i) {  // re-pin sensors
    const auto [r, c] = proj.pixel_of[i];
    smoothed.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = values[i];
  }
  return smoothed;
}

Matrix interpolate(const std::vector<double>& values, const SensorProjection& proj,
                   const InterpConfig& cfg) {
  if (cfg.method == InterpMethod::IdwNearestBorder || cfg.method == InterpMethod::IdwZeroBorder)
    return idw_interpolate(values, proj, cfg);
  return classic_interpolate(values, proj, cfg);
}

Matrix interpolate(const std::map<std::string, double>& values, const SensorProjection& proj,
                   const InterpConfig& cfg) {
  std::vector<double> aligned(proj.channels.size());
  for (std::size_t i = 0; i < proj.channels.size(); ++i) {
    const auto it = values.find(proj.channels[i]);
    if (it == values.end())
      throw std::runtime_error("no value for projected channel '" + proj.channels[i] + "'");
    aligned[i] = it->second;
  }
  return interpolate(aligned, proj, cfg);
}

FeatureGrid model2_tensor(const FeatureMatrix& features, const SensorProjection& proj,
                          const InterpConfig& cfg) {
  if (features.data.rows != proj.channels.size())
    throw std::runtime_error("feature matrix rows do not match projection channels");
  const std::size_t b = features.data.cols;
  const auto k = static_cast<std::size_t>(proj.grid_size);

  FeatureGrid out;
  out.data = Tensor3(k, k, b);
  out.feature_layout = features.feature_layout;
  out.info = features.info;

  std::vector<double> column(features.data.rows);
  for (std::size_t slice = 0; slice < b; ++slice) {
    for (std::size_t ch = 0; ch < features.data.rows; ++ch)
      column[ch] = features.data.at(ch, slice);
    const Matrix grid = interpolate(column, proj, cfg);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) out.data.at(r, c, slice) = grid.at(r, c);
  }
  return out;
}

void write_slice_pgm(const Matrix& slice, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  double lo = slice.v.empty() ? 0.0 : slice.v.front();
  double hi = lo;
  for (double x : slice.v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double scale = (hi > lo) ? 255.0 / (hi - lo) : 0.0;
  out << "P2\n" << slice.cols << " " << slice.rows << "\n255\n";
  for (std::size_t r = 0; r < slice.rows; ++r) {
    for (std::size_t c = 0; c < slice.cols; ++c) {
      if (c) out << " ";
      out << static_cast<int>(std::lround((slice.at(r, c) - lo) * scale));
    }
    out << "\n";
  }
}

void write_slice_csv(const Matrix& slice, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.precision(12);
  for (std::size_t r = 0; r < slice.rows; ++r) {
    for (std::size_t c = 0; c < slice.cols; ++c) {
      if (c) out << ",";
      out << slice.at(r, c);
    }
    out << "\n";
  }
}

}  // namespace eegrid
