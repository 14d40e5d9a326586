#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace eegrid {

struct SvmParams {
  double sigma{0.4};  // RBF width: k(u,v) = exp(-|u-v|^2 / (2 sigma^2))
  double c{1.0};      // box constraint
  double tol{1e-3};   // KKT tolerance
  long max_steps{200000};
};

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alpha;   // alpha_i > 0, aligned with support_vectors
  std::vector<int> labels;     // +-1, aligned with support_vectors
  double bias{0.0};            // decision u(x) = sum alpha_i y_i k(x_i, x) - bias
  double sigma{0.4};
  double c{1.0};

  double sum_alpha_y() const;  // dual constraint residual, 0 up to rounding
};

// Trains a soft-margin RBF SVM by sequential minimal optimization until no
// example violates the KKT conditions beyond tol. Labels are 0/1. Throws on
// single-class input and on non-convergence within max_steps.
SvmModel svm_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                   const SvmParams& params);

double svm_decision(const SvmModel& model, std::span<const double> query);
int svm_predict(const SvmModel& model, std::span<const double> query);  // 1 iff decision >= 0

struct SvmGrid {
  std::vector<double> c_values{0.1, 1.0, 10.0};
  std::vector<double> sigma_values{0.2, 0.4, 0.8};
};

struct GridSearchResult {
  double c{1.0};
  double sigma{0.4};
  double validation_accuracy{0.0};
};

// Exhaustive search over the grid, scored by validation accuracy. Ties break
// toward smaller C, then larger sigma; the result does not depend on the
// enumeration order of the supplied grids.
GridSearchResult grid_search(const std::vector<std::vector<double>>& train_x,
                             const std::vector<int>& train_y,
                             const std::vector<std::vector<double>>& valid_x,
                             const std::vector<int>& valid_y, const SvmGrid& grid,
                             double tol = 1e-3);

}  // namespace eegrid
