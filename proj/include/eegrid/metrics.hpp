#pragma once

#include <optional>
#include <span>
#include <stdexcept>

namespace eegrid {

// Binary confusion counts with the patient/positive class first. Derived
// quantities are always recomputed, never stored.
struct ConfusionMatrix {
  long tp{0}, fn{0}, fp{0}, tn{0};

  long total() const { return tp + fn + fp + tn; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    tp += other.tp;
    fn += other.fn;
    fp += other.fp;
    tn += other.tn;
    return *this;
  }
};

// Degenerate ratios (zero denominators) come back as nullopt rather than 0.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

inline Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw std::runtime_error("metrics: empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp > 0)
    m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  if (cm.tp + cm.fn > 0)
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  return m;
}

// Subject-level vote: patient (1) when the fraction of samples classified 1
// reaches the threshold.
inline int subject_vote(std::span<const int> sample_predictions, double threshold = 0.5) {
  if (sample_predictions.empty()) throw std::runtime_error("subject_vote: no samples");
  long positive = 0;
  for (int p : sample_predictions) positive += p;
  const double fraction =
      static_cast<double>(positive) / static_cast<double>(sample_predictions.size());
  return fraction >= threshold ? 1 : 0;
}

}  // namespace eegrid
