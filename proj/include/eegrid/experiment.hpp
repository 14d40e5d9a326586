#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eegrid/config.hpp"
#include "eegrid/folds.hpp"
#include "eegrid/metrics.hpp"

namespace eegrid {

struct ExtractResult {
  std::string config_hash;
  std::string samples_file;
  std::size_t sample_count{0};
};

struct FoldRecord {
  int fold{0};
  ConfusionMatrix cm;
  std::optional<double> accuracy;
  std::optional<double> f1;
};

struct ExperimentReport {
  std::string config_hash;
  std::uint64_t seed{0};
  std::string task;
  int model{1};
  std::string classifier;
  std::vector<FoldRecord> folds;
  ConfusionMatrix pooled;
  std::optional<double> mean_accuracy;  // mean of per-fold accuracies
  std::optional<double> pooled_f1;      // F1 of the pooled confusion matrix
  FoldPlan plan;                        // for compare-arm validation

  // One JSON object per fold plus one aggregate, fixed field names
  // (fold, accuracy, f1, tp, fn, fp, tn, p_value) plus config_hash and seed.
  std::string to_jsonl() const;
};

struct CompareReport {
  std::string config_hash_a;
  std::string config_hash_b;
  std::vector<double> fold_accuracy_a;
  std::vector<double> fold_accuracy_b;
  double p_value{1.0};
  std::size_t n_pairs{0};
  bool exact{false};

  std::string to_json() const;
};

// Feature extraction: preprocess + WPD features, then model-1 matrices or
// model-2 grids written to <output_dir>/samples_model{1,2}.eegr along with
// manifest.json carrying the config hash. Re-running with an unchanged
// config rewrites byte-identical files.
ExtractResult run_extract(const ExperimentConfig& cfg);

// Full k-fold protocol on the extracted samples (extracting first when the
// store is missing or stale, so extract+experiment matches a fused run).
// Augmentation touches training folds only; leakage aborts the run. The
// report is also written to <output_dir>/report.jsonl.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Paired per-fold accuracies plus the one-sided Wilcoxon signed-rank test of
// "arm B beats arm A". Both arms must share the fold protocol.
CompareReport run_compare(const ExperimentConfig& arm_a, const ExperimentConfig& arm_b);

}  // namespace eegrid
