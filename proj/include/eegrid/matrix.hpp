#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eegrid {

// Dense row-major matrix of doubles. Just enough for this pipeline; not a
// linear algebra library.
struct Matrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<double> v;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {v.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {v.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

// Row-major 3D tensor, index order (d0, d1, d2). Model-2 grids use
// (row, col, band).
struct Tensor3 {
  std::size_t d0{0}, d1{0}, d2{0};
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(std::size_t a, std::size_t b, std::size_t c, double fill = 0.0)
      : d0(a), d1(b), d2(c), v(a * b * c, fill) {}

  double& at(std::size_t i, std::size_t j, std::size_t k) { return v[(i * d1 + j) * d2 + k]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return v[(i * d1 + j) * d2 + k]; }

  std::size_t size() const { return v.size(); }

  bool operator==(const Tensor3&) const = default;
};

}  // namespace eegrid
