#include "eegrid/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eegrid/util.hpp"

namespace eegrid {

namespace {

double rbf(std::span<const double> u, std::span<const double> v, double inv_two_sigma_sq) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double diff = u[j] - v[j];
    d2 += diff * diff;
  }
  return std::exp(-d2 * inv_two_sigma_sq);
}

// Platt's SMO over a precomputed Gram matrix with a full error cache.
class SmoSolver {
 public:
  SmoSolver(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
            const SvmParams& params)
      : x_(x), y_(y), p_(params), n_(x.size()), rng_(0x5eedULL) {
    if (p_.sigma <= 0.0) throw std::runtime_error("svm: sigma must be positive");
    if (p_.c <= 0.0) throw std::runtime_error("svm: C must be positive");
    inv_two_sigma_sq_ = 1.0 / (2.0 * p_.sigma * p_.sigma);
    gram_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = rbf(x_[i], x_[j], inv_two_sigma_sq_);
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
    }
    alpha_.assign(n_, 0.0);
    bias_ = 0.0;
    errors_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
  }

  void solve() {
    long steps = 0;
    bool examine_all = true;
    std::size_t changed = 0;
    while (changed > 0 || examine_all) {
      changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_; ++i) changed += examine(i, steps);
      } else {
        for (std::size_t i = 0; i < n_; ++i) {
          if (!at_lower(alpha_[i]) && !at_upper(alpha_[i])) changed += examine(i, steps);
        }
      }
      if (examine_all)
        examine_all = false;
      else if (changed == 0)
        examine_all = true;
      if (steps > p_.max_steps)
        throw std::runtime_error("svm: SMO did not converge within " +
                                 std::to_string(p_.max_steps) + " steps");
    }
    verify_kkt();
  }

  SvmModel model() const {
    SvmModel m;
    m.sigma = p_.sigma;
    m.c = p_.c;
    m.bias = bias_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!at_lower(alpha_[i])) {
        m.support_vectors.push_back(x_[i]);
        m.alpha.push_back(alpha_[i]);
        m.labels.push_back(y_[i]);
      }
    }
    return m;
  }

 private:
  double kernel(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }

  // Bound classification with a relative tolerance: pairwise updates keep the
  // dual constraint exact but can leave an alpha a hair off its bound, which
  // must not be mistaken for an interior point.
  double bound_eps() const { return 1e-8 * p_.c; }
  bool at_lower(double a) const { return a <= bound_eps(); }
  bool at_upper(double a) const { return a >= p_.c - bound_eps(); }

  // Current decision value for training point i: u_i = errors_[i] + y_i.
  double decision(std::size_t i) const { return errors_[i] + static_cast<double>(y_[i]); }

  std::size_t examine(std::size_t i2, long& steps) {
    const double y2 = y_[i2];
    const double alph2 = alpha_[i2];
    const double e2 = errors_[i2];
    const double r2 = e2 * y2;

    const bool violates =
        (r2 < -p_.tol && !at_upper(alph2)) || (r2 > p_.tol && !at_lower(alph2));
    if (!violates) return 0;

    // Second-choice heuristic: largest |E1 - E2| among non-bound points.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!at_lower(alpha_[i]) && !at_upper(alpha_[i])) {
        const double gap = std::abs(errors_[i] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
    }
    if (best < n_ && take_step(best, i2, steps)) return 1;

    // Then all non-bound points from a random start, then everything.
    const std::size_t offset = static_cast<std::size_t>(rng_.uniform_int(n_));
    for (std::size_t t = 0; t < n_; ++t) {
      const std::size_t i1 = (t + offset) % n_;
      if (!at_lower(alpha_[i1]) && !at_upper(alpha_[i1]) && take_step(i1, i2, steps)) return 1;
    }
    for (std::size_t t = 0; t < n_; ++t) {
      const std::size_t i1 = (t + offset) % n_;
      if (take_step(i1, i2, steps)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2, long& steps) {
    if (i1 == i2) return false;
    ++steps;

    const double alph1 = alpha_[i1];
    const double alph2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = errors_[i1];
    const double e2 = errors_[i2];
    const double s = y1 * y2;

    double low, high;
    if (s < 0.0) {
      low = std::max(0.0, alph2 - alph1);
      high = std::min(p_.c, p_.c + alph2 - alph1);
    } else {
      low = std::max(0.0, alph1 + alph2 - p_.c);
      high = std::min(p_.c, alph1 + alph2);
    }
    if (low >= high) return false;

    const double k11 = kernel(i1, i1);
    const double k12 = kernel(i1, i2);
    const double k22 = kernel(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = alph2 + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, low, high);
    } else {
      // Objective at the segment endpoints (degenerate curvature).
      const double f1 = y1 * (e1 + bias_) - alph1 * k11 - s * alph2 * k12;
      const double f2 = y2 * (e2 + bias_) - s * alph1 * k12 - alph2 * k22;
      const double l1 = alph1 + s * (alph2 - low);
      const double h1 = alph1 + s * (alph2 - high);
      const double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 + 0.5 * low * low * k22 +
                             s * low * l1 * k12;
      const double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                              0.5 * high * high * k22 + s * high * h1 * k12;
      if (obj_low < obj_high - 1e-12)
        a2 = low;
      else if (obj_low > obj_high + 1e-12)
        a2 = high;
      else
        return false;
    }

    if (a2 < 1e-8 * p_.c) a2 = 0.0;
    if (a2 > p_.c * (1.0 - 1e-8)) a2 = p_.c;
    if (std::abs(a2 - alph2) < 1e-12 * (a2 + alph2 + 1e-12)) return false;

    const double a1 = alph1 + s * (alph2 - a2);

    const double b_old = bias_;
    const double b1 = e1 + y1 * (a1 - alph1) * k11 + y2 * (a2 - alph2) * k12 + bias_;
    const double b2 = e2 + y1 * (a1 - alph1) * k12 + y2 * (a2 - alph2) * k22 + bias_;
    if (!at_lower(a1) && !at_upper(a1))
      bias_ = b1;
    else if (!at_lower(a2) && !at_upper(a2))
      bias_ = b2;
    else
      bias_ = 0.5 * (b1 + b2);

    alpha_[i1] = a1;
    alpha_[i2] = a2;

    const double d1 = y1 * (a1 - alph1);
    const double d2 = y2 * (a2 - alph2);
    const double db = bias_ - b_old;
    for (std::size_t i = 0; i < n_; ++i)
      errors_[i] += d1 * kernel(i1, i) + d2 * kernel(i2, i) - db;
    return true;
  }

  void verify_kkt() const {
    for (std::size_t i = 0; i < n_; ++i) {
      const double margin = static_cast<double>(y_[i]) * decision(i);
      double violation = 0.0;
      if (at_lower(alpha_[i]))
        violation = std::max(0.0, 1.0 - margin);
      else if (at_upper(alpha_[i]))
        violation = std::max(0.0, margin - 1.0);
      else
        violation = std::abs(margin - 1.0);
      if (violation > p_.tol * (1.0 + 1e-9))
        throw std::runtime_error("svm: KKT residual above tolerance after training");
    }
  }

  const std::vector<std::vector<double>>& x_;
  std::vector<int> y_;  // +-1
  SvmParams p_;
  std::size_t n_;
  double inv_two_sigma_sq_{0.0};
  std::vector<double> gram_;
  std::vector<double> alpha_;
  std::vector<double> errors_;  // E_i = u_i - y_i
  double bias_{0.0};
  Rng rng_;

 public:
  static std::vector<int> to_signed(const std::vector<int>& y01) {
    std::vector<int> y(y01.size());
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t i = 0; i < y01.size(); ++i) {
      if (y01[i] != 0 && y01[i] != 1) throw std::runtime_error("svm: labels must be 0 or 1");
      y[i] = y01[i] == 1 ? 1 : -1;
      (y[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw std::runtime_error("svm: both classes must be present");
    return y;
  }
};

}  // namespace

double SvmModel::sum_alpha_y() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) sum += alpha[i] * labels[i];
  return sum;
}

SvmModel svm_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                   const SvmParams& params) {
  if (x.empty()) throw std::runtime_error("svm: empty training set");
  if (x.size() != y.size()) throw std::runtime_error("svm: label count mismatch");
  for (const auto& row : x) {
    if (row.size() != x.front().size()) throw std::runtime_error("svm: ragged feature vectors");
  }
  SmoSolver solver(x, SmoSolver::to_signed(y), params);
  solver.solve();
  return solver.model();
}

double svm_decision(const SvmModel& model, std::span<const double> query) {
  const double inv_two_sigma_sq = 1.0 / (2.0 * model.sigma * model.sigma);
  double u = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    u += model.alpha[i] * model.labels[i] * rbf(model.support_vectors[i], query, inv_two_sigma_sq);
  }
  return u - model.bias;
}

int svm_predict(const SvmModel& model, std::span<const double> query) {
  return svm_decision(model, query) >= 0.0 ? 1 : 0;
}

GridSearchResult grid_search(const std::vector<std::vector<double>>& train_x,
                             const std::vector<int>& train_y,
                             const std::vector<std::vector<double>>& valid_x,
                             const std::vector<int>& valid_y, const SvmGrid& grid,
                             double tol) {
  if (grid.c_values.empty() || grid.sigma_values.empty())
    throw std::runtime_error("grid_search: empty grid");
  if (valid_x.size() != valid_y.size())
    throw std::runtime_error("grid_search: validation label count mismatch");

  std::vector<double> cs = grid.c_values;
  std::vector<double> sigmas = grid.sigma_values;
  std::sort(cs.begin(), cs.end());                            // smaller C wins ties
  std::sort(sigmas.begin(), sigmas.end(), std::greater<>());  // then larger sigma

  GridSearchResult best;
  double best_accuracy = -1.0;
  for (double c : cs) {
    for (double sigma : sigmas) {
      SvmParams params;
      params.c = c;
      params.sigma = sigma;
      params.tol = tol;
      const SvmModel model = svm_train(train_x, train_y, params);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < valid_x.size(); ++i) {
        if (svm_predict(model, valid_x[i]) == valid_y[i]) ++correct;
      }
      const double accuracy = valid_x.empty()
                                  ? 0.0
                                  : static_cast<double>(correct) / static_cast<double>(valid_x.size());
      if (accuracy > best_accuracy) {
        best_accuracy = accuracy;
        best = {c, sigma, accuracy};
      }
    }
  }
  return best;
}

}  // namespace eegrid
