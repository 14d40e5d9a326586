#include "eegrid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "eegrid/augment.hpp"
#include "eegrid/cnn.hpp"
#include "eegrid/knn.hpp"
#include "eegrid/preprocess.hpp"
#include "eegrid/sample_store.hpp"
#include "eegrid/svm.hpp"
#include "eegrid/synthetic.hpp"
#include "eegrid/topomap.hpp"
#include "eegrid/util.hpp"
#include "eegrid/wilcoxon.hpp"

namespace eegrid {

namespace {

using nlohmann::json;

constexpr double kWpdRateHz = 128.0;  // band table is defined at this rate

struct LoadedInputs {
  Montage montage;
  std::vector<LabeledRecording> recordings;
};

LoadedInputs load_inputs(const ExperimentConfig& cfg) {
  LoadedInputs out;
  const Task task = task_from_name(cfg.task);

  if (cfg.synthetic.subjects > 0) {
    out.montage = cfg.montage_path().empty()
                      ? (task == Task::Sad ? builtin_montage_sad34() : builtin_montage_deap32())
                      : load_montage(cfg.montage_path());
    SyntheticSpec spec;
    spec.subjects = cfg.synthetic.subjects;
    spec.seconds = cfg.synthetic.seconds;
    spec.sample_rate_hz = kWpdRateHz;
    spec.tone_hz = cfg.synthetic.tone_hz;
    spec.tone_amplitude = cfg.synthetic.tone_amplitude;
    spec.noise_amplitude = cfg.synthetic.noise_amplitude;
    spec.fingerprint_amplitude = cfg.synthetic.fingerprint_amplitude;
    spec.jitter_radius = cfg.synthetic.jitter_radius;
    spec.seed = cfg.seed;
    auto dataset = make_synthetic_dataset(out.montage, spec);
    out.recordings =
        apply_labels(std::move(dataset.recordings), dataset.ratings, task);
    return out;
  }

  out.montage = load_montage(cfg.montage_path());
  const RatingTable ratings = load_ratings(cfg.labels_path());

  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(cfg.recordings_dir()))
    throw std::runtime_error("recordings directory not found: " + cfg.recordings_dir().string());
  for (const auto& entry : std::filesystem::directory_iterator(cfg.recordings_dir())) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".csv" || ext == ".eegr") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("no .csv or .eegr recordings in " + cfg.recordings_dir().string());

  std::vector<RawRecording> recs;
  recs.reserve(files.size());
  for (const auto& f : files) {
    recs.push_back(load_recording(
        f, f.extension() == ".csv" ? RecordingFormat::Csv : RecordingFormat::RawF32));
  }
  out.recordings = apply_labels(std::move(recs), ratings, task);
  return out;
}

std::filesystem::path samples_path(const ExperimentConfig& cfg) {
  return cfg.output_dir() / ("samples_model" + std::to_string(cfg.model) + ".eegr");
}

std::filesystem::path manifest_path(const ExperimentConfig& cfg) {
  return cfg.output_dir() / "manifest.json";
}

bool extraction_current(const ExperimentConfig& cfg) {
  const auto mpath = manifest_path(cfg);
  if (!std::filesystem::exists(mpath) || !std::filesystem::exists(samples_path(cfg)))
    return false;
  std::ifstream in(mpath);
  json j;
  try {
    in >> j;
  } catch (...) {
    return false;
  }
  return j.value("config_hash", "") == cfg.config_hash();
}

// ---------------------------------------------------------------------------
// Per-fold classification

struct SampleView {
  UnitKey unit;
  int label{0};
  std::string subject;
};

UnitKey unit_of(const SampleInfo& info, FoldMode mode) {
  if (mode == FoldMode::SubjectIndependent) return {info.subject_id, ""};
  return {info.subject_id, info.trial_id};
}

FoldMode fold_mode(const ExperimentConfig& cfg) {
  return cfg.mode == "independent" ? FoldMode::SubjectIndependent : FoldMode::SubjectDependent;
}

// Unit list with stratification labels: the unit's label in dependent mode,
// the majority sample label per subject in independent mode.
std::vector<LabeledUnit> collect_units(const std::vector<SampleView>& samples) {
  std::map<UnitKey, std::pair<long, long>> counts;  // unit -> (zeros, ones)
  for (const auto& s : samples) {
    auto& c = counts[s.unit];
    (s.label == 1 ? c.second : c.first)++;
  }
  std::vector<LabeledUnit> units;
  units.reserve(counts.size());
  for (const auto& [key, c] : counts)
    units.push_back({key, c.second >= c.first ? 1 : 0});
  return units;
}

struct FoldSplit {
  std::vector<std::size_t> train;  // indices into the sample vector
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

FoldSplit split_fold(const std::vector<SampleView>& samples, const FoldPlan& plan,
                     int test_fold) {
  const int validation_fold = (test_fold + 1) % plan.k;
  FoldSplit split;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int fold = plan.fold_of(samples[i].unit);
    if (fold == test_fold)
      split.test.push_back(i);
    else if (fold == validation_fold)
      split.validation.push_back(i);
    else
      split.train.push_back(i);
  }
  return split;
}

void assert_no_leakage(const std::vector<SampleView>& samples, const FoldSplit& split) {
  std::set<UnitKey> train_units, val_units, test_units;
  for (auto i : split.train) train_units.insert(samples[i].unit);
  for (auto i : split.validation) val_units.insert(samples[i].unit);
  for (auto i : split.test) test_units.insert(samples[i].unit);
  for (const auto& u : val_units) {
    if (train_units.count(u)) throw std::runtime_error("leakage: unit in train and validation");
  }
  for (const auto& u : test_units) {
    if (train_units.count(u)) throw std::runtime_error("leakage: unit in train and test");
    if (val_units.count(u)) throw std::runtime_error("leakage: unit in validation and test");
  }
}

// Train-set standardization applied to every split (RBF and Euclidean
// distances are scale-sensitive).
struct Standardizer {
  std::vector<double> mean, inv_sd;

  void fit(const std::vector<std::vector<double>>& x) {
    const std::size_t dim = x.front().size();
    mean.assign(dim, 0.0);
    inv_sd.assign(dim, 1.0);
    for (const auto& row : x)
      for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
    for (auto& m : mean) m /= static_cast<double>(x.size());
    std::vector<double> var(dim, 0.0);
    for (const auto& row : x)
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = row[j] - mean[j];
        var[j] += d * d;
      }
    for (std::size_t j = 0; j < dim; ++j) {
      var[j] /= static_cast<double>(x.size());
      inv_sd[j] = var[j] > 0.0 ? 1.0 / std::sqrt(var[j]) : 0.0;  // constant dims zeroed
    }
  }

  void apply(std::vector<std::vector<double>>& x) const {
    for (auto& row : x)
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) * inv_sd[j];
  }
};

// Owns the per-model sample payloads and flattens/batches them on demand.
class SampleBank {
 public:
  SampleBank(std::vector<FeatureMatrix> m1, std::vector<FeatureGrid> m2, int model)
      : model1_(std::move(m1)), model2_(std::move(m2)), model_(model) {}

  std::size_t size() const { return model_ == 1 ? model1_.size() : model2_.size(); }

  const SampleInfo& info(std::size_t i) const {
    return model_ == 1 ? model1_[i].info : model2_[i].info;
  }

  std::vector<double> flat(std::size_t i) const {
    return model_ == 1 ? model1_[i].data.v : model2_[i].data.v;
  }

  Shape3 tensor_shape() const {
    if (model_ == 1)
      return {static_cast<int>(model1_.front().data.rows),
              static_cast<int>(model1_.front().data.cols), 1};
    return {static_cast<int>(model2_.front().data.d0),
            static_cast<int>(model2_.front().data.d1),
            static_cast<int>(model2_.front().data.d2)};
  }

  // Augments the selected samples with the plan (training folds only).
  std::pair<std::vector<std::vector<double>>, std::vector<int>> augmented_flat(
      const std::vector<std::size_t>& idx, const AugmentPlan* plan) const {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    if (model_ == 1) {
      std::vector<FeatureMatrix> picked;
      picked.reserve(idx.size());
      for (auto i : idx) picked.push_back(model1_[i]);
      const auto expanded =
          plan ? expand_training_set(picked, *plan) : std::move(picked);
      for (const auto& s : expanded) {
        x.push_back(s.data.v);
        y.push_back(s.info.label);
      }
    } else {
      std::vector<FeatureGrid> picked;
      picked.reserve(idx.size());
      for (auto i : idx) picked.push_back(model2_[i]);
      const auto expanded =
          plan ? expand_training_set(picked, *plan) : std::move(picked);
      for (const auto& s : expanded) {
        x.push_back(s.data.v);
        y.push_back(s.info.label);
      }
    }
    return {std::move(x), std::move(y)};
  }

 private:
  std::vector<FeatureMatrix> model1_;
  std::vector<FeatureGrid> model2_;
  int model_;
};

Tensor4 to_tensor(const std::vector<std::vector<double>>& x, Shape3 shape) {
  Tensor4 out(static_cast<int>(x.size()), shape);
  const auto stride = static_cast<std::size_t>(shape.count());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != stride) throw std::runtime_error("sample size does not match shape");
    std::copy(x[i].begin(), x[i].end(), out.v.begin() + static_cast<std::ptrdiff_t>(i * stride));
  }
  return out;
}

std::optional<AugmentPlan> make_plan(const ExperimentConfig& cfg) {
  const AugmentTarget target = cfg.model == 1 ? AugmentTarget::Model1 : AugmentTarget::Model2;
  if (cfg.augmentation == "none") return std::nullopt;
  if (cfg.augmentation == "one_pixel") return AugmentPlan::one_pixel(target);
  return AugmentPlan::one_and_two_pixels(target);
}

// Sample-level predictions for the test split of one fold.
std::vector<int> classify_fold(const ExperimentConfig& cfg, const SampleBank& bank,
                               const FoldSplit& split, std::uint64_t fold_seed) {
  const auto plan = make_plan(cfg);
  const AugmentPlan* plan_ptr = plan ? &*plan : nullptr;

  if (cfg.classifier == "knn3" || cfg.classifier == "knn5") {
    const int k = cfg.classifier == "knn3" ? 3 : 5;
    // No hyper-parameters to tune: the validation fold joins the training
    // folds and the whole reference set is augmented.
    std::vector<std::size_t> reference = split.train;
    reference.insert(reference.end(), split.validation.begin(), split.validation.end());
    auto [train_x, train_y] = bank.augmented_flat(reference, plan_ptr);
    Standardizer standardizer;
    standardizer.fit(train_x);
    standardizer.apply(train_x);
    std::vector<int> predictions;
    predictions.reserve(split.test.size());
    for (auto i : split.test) {
      std::vector<std::vector<double>> q{bank.flat(i)};
      standardizer.apply(q);
      predictions.push_back(knn_classify(train_x, train_y, q.front(), k));
    }
    return predictions;
  }

  if (cfg.classifier == "svm") {
    auto [train_x, train_y] = bank.augmented_flat(split.train, plan_ptr);
    auto [valid_x, valid_y] = bank.augmented_flat(split.validation, nullptr);
    Standardizer standardizer;
    standardizer.fit(train_x);
    standardizer.apply(train_x);
    standardizer.apply(valid_x);

    SvmGrid grid;
    grid.c_values = cfg.svm.c_grid;
    grid.sigma_values = cfg.svm.sigma_grid;
    const GridSearchResult best =
        grid_search(train_x, train_y, valid_x, valid_y, grid, cfg.svm.tol);

    // Refit on the training+validation folds with the chosen
    // hyper-parameters before testing.
    std::vector<std::size_t> reference = split.train;
    reference.insert(reference.end(), split.validation.begin(), split.validation.end());
    auto [full_x, full_y] = bank.augmented_flat(reference, plan_ptr);
    Standardizer full_standardizer;
    full_standardizer.fit(full_x);
    full_standardizer.apply(full_x);
    SvmParams params;
    params.c = best.c;
    params.sigma = best.sigma;
    params.tol = cfg.svm.tol;
    const SvmModel model = svm_train(full_x, full_y, params);

    std::vector<int> predictions;
    predictions.reserve(split.test.size());
    for (auto i : split.test) {
      std::vector<std::vector<double>> q{bank.flat(i)};
      full_standardizer.apply(q);
      predictions.push_back(svm_predict(model, q.front()));
    }
    return predictions;
  }

  // CNN path.
  auto [train_x, train_y] = bank.augmented_flat(split.train, plan_ptr);
  auto [valid_x, valid_y] = bank.augmented_flat(split.validation, nullptr);
  const Shape3 shape = bank.tensor_shape();

  Dataset train_set{to_tensor(train_x, shape), train_y};
  Dataset valid_set{to_tensor(valid_x, shape), valid_y};

  const Task task = task_from_name(cfg.task);
  Network net(build_preset(task == Task::Sad ? Preset::SadNet : Preset::DeapNet, shape));
  TrainConfig tc;
  tc.batch_size = cfg.cnn.batch_size;
  tc.learning_rate = cfg.cnn.learning_rate;
  tc.max_epochs = cfg.cnn.max_epochs;
  tc.patience = cfg.cnn.patience;
  tc.optimizer = cfg.cnn.optimizer == "adam" ? OptimizerKind::Adam : OptimizerKind::Sgd;
  tc.seed = fold_seed;
  train(net, train_set, valid_set, tc);

  std::vector<int> predictions;
  predictions.reserve(split.test.size());
  for (auto i : split.test) {
    std::vector<std::vector<double>> q{bank.flat(i)};
    const Matrix probs = net.forward(to_tensor(q, shape), Mode::Eval);
    predictions.push_back(probs.at(0, 1) >= probs.at(0, 0) ? 1 : 0);
  }
  return predictions;
}

FoldRecord score_fold(const ExperimentConfig& cfg, const std::vector<SampleView>& samples,
                      const FoldSplit& split, const std::vector<int>& predictions,
                      int fold_index) {
  ConfusionMatrix cm;
  if (cfg.task == "sad") {
    // Subject-level vote, positive class = patient.
    std::map<std::string, std::vector<int>> by_subject;
    std::map<std::string, int> subject_label;
    for (std::size_t t = 0; t < split.test.size(); ++t) {
      const auto& s = samples[split.test[t]];
      by_subject[s.subject].push_back(predictions[t]);
      subject_label[s.subject] = s.label;
    }
    for (const auto& [subject, preds] : by_subject) {
      const int voted = subject_vote(preds);
      const int truth = subject_label[subject];
      if (truth == 1)
        (voted == 1 ? cm.tp : cm.fn)++;
      else
        (voted == 1 ? cm.fp : cm.tn)++;
    }
  } else {
    for (std::size_t t = 0; t < split.test.size(); ++t) {
      const int truth = samples[split.test[t]].label;
      const int pred = predictions[t];
      if (truth == 1)
        (pred == 1 ? cm.tp : cm.fn)++;
      else
        (pred == 1 ? cm.fp : cm.tn)++;
    }
  }
  FoldRecord record;
  record.fold = fold_index;
  record.cm = cm;
  const Metrics m = metrics(cm);
  record.accuracy = m.accuracy;
  record.f1 = m.f1;
  return record;
}

json record_to_json(const std::string& hash, std::uint64_t seed, const json& fold,
                    const FoldRecord& r) {
  json j;
  j["fold"] = fold;
  j["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
  j["f1"] = r.f1 ? json(*r.f1) : json(nullptr);
  j["tp"] = r.cm.tp;
  j["fn"] = r.cm.fn;
  j["fp"] = r.cm.fp;
  j["tn"] = r.cm.tn;
  j["p_value"] = nullptr;
  j["config_hash"] = hash;
  j["seed"] = seed;
  return j;
}

}  // namespace

std::string ExperimentReport::to_jsonl() const {
  std::string out;
  for (const auto& r : folds) {
    out += record_to_json(config_hash, seed, json(r.fold), r).dump();
    out += "\n";
  }
  FoldRecord aggregate;
  aggregate.cm = pooled;
  aggregate.accuracy = mean_accuracy;
  aggregate.f1 = pooled_f1;
  out += record_to_json(config_hash, seed, json("aggregate"), aggregate).dump();
  out += "\n";
  return out;
}

std::string CompareReport::to_json() const {
  json j;
  j["config_hash_a"] = config_hash_a;
  j["config_hash_b"] = config_hash_b;
  j["fold_accuracy_a"] = fold_accuracy_a;
  j["fold_accuracy_b"] = fold_accuracy_b;
  j["p_value"] = p_value;
  j["n_pairs"] = n_pairs;
  j["exact"] = exact;
  return j.dump();
}

ExtractResult run_extract(const ExperimentConfig& cfg) {
  cfg.validate();
  const Task task = task_from_name(cfg.task);
  LoadedInputs inputs = load_inputs(cfg);

  const auto qmf = make_db4();
  const auto bands = make_band_specs(kWpdRateHz, 4, task == Task::Sad);
  const bool include_entropy = cfg.features == "energy_entropy";

  SensorProjection proj;
  InterpConfig interp;
  if (cfg.model == 2) {
    proj = project_montage(inputs.montage, cfg.grid_size);
    interp.method = interp_method_from_name(cfg.interpolation.method);
    interp.d_max = cfg.interpolation.d_max;
    interp.idw_power = cfg.interpolation.idw_power;
  }

  std::vector<FeatureMatrix> matrices;
  std::vector<FeatureGrid> grids;
  for (const auto& labeled : inputs.recordings) {
    RawRecording rec = align_to_montage(labeled.recording, inputs.montage);
    if (rec.sample_rate_hz != kWpdRateHz) rec = decimate_recording(rec, kWpdRateHz);
    if (task != Task::Sad) rec = common_average_reference(rec);
    rec = normalize_channel(rec);
    const auto windows = segment(rec, cfg.window_seconds, cfg.shift_seconds,
                                 cfg.baseline_trim_seconds, labeled.label);
    for (const auto& w : windows) {
      FeatureMatrix fm = model1_matrix(w, bands, include_entropy, qmf);
      if (cfg.model == 2)
        grids.push_back(model2_tensor(fm, proj, interp));
      else
        matrices.push_back(std::move(fm));
    }
  }

  std::filesystem::create_directories(cfg.output_dir());
  const auto path = samples_path(cfg);

  FeatureSetMeta meta;
  meta.model = cfg.model;
  meta.task = cfg.task;
  meta.feature_layout = feature_layout_names(bands, include_entropy);
  meta.channels = inputs.montage.names;
  if (cfg.model == 1) {
    meta.rows = static_cast<int>(inputs.montage.size());
    meta.cols = static_cast<int>(meta.feature_layout.size());
    meta.depth = 1;
    save_feature_matrices(meta, matrices, path);
  } else {
    meta.rows = cfg.grid_size;
    meta.cols = cfg.grid_size;
    meta.depth = static_cast<int>(meta.feature_layout.size());
    save_feature_grids(meta, grids, path);
  }

  ExtractResult result;
  result.config_hash = cfg.config_hash();
  result.samples_file = path.string();
  result.sample_count = cfg.model == 1 ? matrices.size() : grids.size();

  json manifest;
  manifest["config_hash"] = result.config_hash;
  manifest["model"] = cfg.model;
  manifest["task"] = cfg.task;
  manifest["sample_count"] = result.sample_count;
  manifest["samples_file"] = path.filename().string();
  std::ofstream mout(manifest_path(cfg));
  if (!mout) throw std::runtime_error("cannot write " + manifest_path(cfg).string());
  mout << manifest.dump(2) << "\n";
  return result;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!extraction_current(cfg)) run_extract(cfg);

  const FoldMode mode = fold_mode(cfg);
  const FeatureSetMeta meta = peek_feature_set(samples_path(cfg));
  if (meta.model != cfg.model || meta.task != cfg.task)
    throw std::runtime_error("sample store holds model-" + std::to_string(meta.model) + " " +
                             meta.task + " samples but the config asks for model-" +
                             std::to_string(cfg.model) + " " + cfg.task);
  SampleBank bank = [&] {
    if (cfg.model == 1) return SampleBank(load_feature_matrices(samples_path(cfg)), {}, 1);
    return SampleBank({}, load_feature_grids(samples_path(cfg)), 2);
  }();
  if (bank.size() == 0) throw std::runtime_error("no extracted samples");

  std::vector<SampleView> samples;
  samples.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto& info = bank.info(i);
    samples.push_back({unit_of(info, mode), info.label, info.subject_id});
  }

  const auto units = collect_units(samples);
  const FoldPlan plan = make_folds(units, cfg.folds, mode, cfg.seed);

  ExperimentReport report;
  report.config_hash = cfg.config_hash();
  report.seed = cfg.seed;
  report.task = cfg.task;
  report.model = cfg.model;
  report.classifier = cfg.classifier;
  report.plan = plan;
  report.folds.resize(static_cast<std::size_t>(cfg.folds));

  std::atomic<int> next_fold{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int fold = next_fold.fetch_add(1);
      if (fold >= cfg.folds || failed.load()) return;
      try {
        const FoldSplit split = split_fold(samples, plan, fold);
        if (split.test.empty()) throw std::runtime_error("empty test fold " + std::to_string(fold));
        assert_no_leakage(samples, split);
        const auto predictions =
            classify_fold(cfg, bank, split, derive_seed(cfg.seed, 7000 + fold));
        report.folds[static_cast<std::size_t>(fold)] =
            score_fold(cfg, samples, split, predictions, fold);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
        return;
      }
    }
  };

  const int thread_count = std::min(cfg.jobs, cfg.folds);
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(failure);

  double accuracy_sum = 0.0;
  std::size_t accuracy_count = 0;
  for (const auto& r : report.folds) {
    report.pooled += r.cm;
    if (r.accuracy) {
      accuracy_sum += *r.accuracy;
      ++accuracy_count;
    }
  }
  if (accuracy_count > 0)
    report.mean_accuracy = accuracy_sum / static_cast<double>(accuracy_count);
  if (report.pooled.total() > 0) report.pooled_f1 = metrics(report.pooled).f1;

  std::filesystem::create_directories(cfg.output_dir());
  std::ofstream out(cfg.output_dir() / "report.jsonl");
  if (!out) throw std::runtime_error("cannot write report.jsonl");
  out << report.to_jsonl();
  return report;
}

CompareReport run_compare(const ExperimentConfig& arm_a, const ExperimentConfig& arm_b) {
  if (arm_a.seed != arm_b.seed || arm_a.folds != arm_b.folds || arm_a.mode != arm_b.mode ||
      arm_a.task != arm_b.task)
    throw std::runtime_error("compare: arms must share task, mode, folds, and seed");

  const ExperimentReport report_a = run_experiment(arm_a);
  const ExperimentReport report_b = run_experiment(arm_b);
  if (report_a.plan.assignment != report_b.plan.assignment)
    throw std::runtime_error("compare: fold plans differ between arms");

  CompareReport out;
  out.config_hash_a = report_a.config_hash;
  out.config_hash_b = report_b.config_hash;
  for (int f = 0; f < arm_a.folds; ++f) {
    const auto& ra = report_a.folds[static_cast<std::size_t>(f)];
    const auto& rb = report_b.folds[static_cast<std::size_t>(f)];
    if (!ra.accuracy || !rb.accuracy)
      throw std::runtime_error("compare: fold accuracy undefined");
    out.fold_accuracy_a.push_back(*ra.accuracy);
    out.fold_accuracy_b.push_back(*rb.accuracy);
  }
  const WilcoxonResult w = wilcoxon_signed_rank(out.fold_accuracy_a, out.fold_accuracy_b);
  out.p_value = w.p_one_sided;
  out.n_pairs = w.n;
  out.exact = w.exact;
  return out;
}

}  // namespace eegrid
