#include "eegrid/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "eegrid/topomap.hpp"
#include "eegrid/util.hpp"

namespace eegrid {

namespace {

using nlohmann::json;

json to_json(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  j["model"] = c.model;
  j["features"] = c.features;
  j["window_seconds"] = c.window_seconds;
  j["shift_seconds"] = c.shift_seconds;
  j["baseline_trim_seconds"] = c.baseline_trim_seconds;
  j["grid_size"] = c.grid_size;
  j["interpolation"] = {{"method", c.interpolation.method},
                        {"d_max", c.interpolation.d_max},
                        {"idw_power", c.interpolation.idw_power}};
  j["augmentation"] = c.augmentation;
  j["classifier"] = c.classifier;
  j["folds"] = c.folds;
  j["mode"] = c.mode;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["svm"] = {{"c_grid", c.svm.c_grid}, {"sigma_grid", c.svm.sigma_grid}, {"tol", c.svm.tol}};
  j["cnn"] = {{"batch_size", c.cnn.batch_size},
              {"learning_rate", c.cnn.learning_rate},
              {"max_epochs", c.cnn.max_epochs},
              {"patience", c.cnn.patience},
              {"optimizer", c.cnn.optimizer}};
  j["synthetic"] = {{"subjects", c.synthetic.subjects},
                    {"seconds", c.synthetic.seconds},
                    {"tone_hz", c.synthetic.tone_hz},
                    {"tone_amplitude", c.synthetic.tone_amplitude},
                    {"noise_amplitude", c.synthetic.noise_amplitude},
                    {"fingerprint_amplitude", c.synthetic.fingerprint_amplitude},
                    {"jitter_radius", c.synthetic.jitter_radius}};
  j["paths"] = {{"data_dir", c.paths.data_dir},
                {"output_dir", c.paths.output_dir},
                {"montage", c.paths.montage},
                {"labels", c.paths.labels},
                {"recordings_dir", c.paths.recordings_dir}};
  return j;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig from_json(const json& j) {
  static const std::set<std::string> known = {
      "task",       "model",          "features",  "window_seconds", "shift_seconds",
      "baseline_trim_seconds", "grid_size", "interpolation", "augmentation",
      "classifier", "folds",          "mode",      "seed",           "jobs",
      "svm",        "cnn",            "synthetic", "paths"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::runtime_error("unknown config key '" + key + "'");
  }

  ExperimentConfig c;
  read_if(j, "task", c.task);
  // Task-sensitive windowing defaults; explicit keys below override them.
  if (c.task == "valence" || c.task == "arousal") {
    c.window_seconds = 4.0;
    c.shift_seconds = 2.0;
    c.baseline_trim_seconds = 3.0;
    c.mode = "dependent";
  }
  read_if(j, "model", c.model);
  read_if(j, "features", c.features);
  read_if(j, "window_seconds", c.window_seconds);
  read_if(j, "shift_seconds", c.shift_seconds);
  read_if(j, "baseline_trim_seconds", c.baseline_trim_seconds);
  read_if(j, "grid_size", c.grid_size);
  if (j.contains("interpolation")) {
    const auto& ji = j.at("interpolation");
    read_if(ji, "method", c.interpolation.method);
    read_if(ji, "d_max", c.interpolation.d_max);
    read_if(ji, "idw_power", c.interpolation.idw_power);
  }
  read_if(j, "augmentation", c.augmentation);
  read_if(j, "classifier", c.classifier);
  read_if(j, "folds", c.folds);
  read_if(j, "mode", c.mode);
  read_if(j, "seed", c.seed);
  read_if(j, "jobs", c.jobs);
  if (j.contains("svm")) {
    const auto& js = j.at("svm");
    read_if(js, "c_grid", c.svm.c_grid);
    read_if(js, "sigma_grid", c.svm.sigma_grid);
    read_if(js, "tol", c.svm.tol);
  }
  if (j.contains("cnn")) {
    const auto& jc = j.at("cnn");
    read_if(jc, "batch_size", c.cnn.batch_size);
    read_if(jc, "learning_rate", c.cnn.learning_rate);
    read_if(jc, "max_epochs", c.cnn.max_epochs);
    read_if(jc, "patience", c.cnn.patience);
    read_if(jc, "optimizer", c.cnn.optimizer);
  }
  if (j.contains("synthetic")) {
    const auto& js = j.at("synthetic");
    read_if(js, "subjects", c.synthetic.subjects);
    read_if(js, "seconds", c.synthetic.seconds);
    read_if(js, "tone_hz", c.synthetic.tone_hz);
    read_if(js, "tone_amplitude", c.synthetic.tone_amplitude);
    read_if(js, "noise_amplitude", c.synthetic.noise_amplitude);
    read_if(js, "fingerprint_amplitude", c.synthetic.fingerprint_amplitude);
    read_if(js, "jitter_radius", c.synthetic.jitter_radius);
  }
  if (j.contains("paths")) {
    const auto& jp = j.at("paths");
    read_if(jp, "data_dir", c.paths.data_dir);
    read_if(jp, "output_dir", c.paths.output_dir);
    read_if(jp, "montage", c.paths.montage);
    read_if(jp, "labels", c.paths.labels);
    read_if(jp, "recordings_dir", c.paths.recordings_dir);
  }
  c.validate();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (task != "sad" && task != "valence" && task != "arousal")
    throw std::runtime_error("config: task must be sad|valence|arousal");
  if (model != 1 && model != 2) throw std::runtime_error("config: model must be 1 or 2");
  if (features != "energy" && features != "energy_entropy")
    throw std::runtime_error("config: features must be energy|energy_entropy");
  if (window_seconds <= 0.0 || shift_seconds <= 0.0 || baseline_trim_seconds < 0.0)
    throw std::runtime_error("config: invalid windowing parameters");
  if (grid_size != 10 && grid_size != 15 && grid_size != 20 && grid_size != 25)
    throw std::runtime_error("config: grid_size must be one of 10, 15, 20, 25");
  interp_method_from_name(interpolation.method);  // throws on unknown names
  if (interpolation.d_max <= 0.0) throw std::runtime_error("config: d_max must be positive");
  if (augmentation != "none" && augmentation != "one_pixel" && augmentation != "one_and_two")
    throw std::runtime_error("config: augmentation must be none|one_pixel|one_and_two");
  if (classifier != "knn3" && classifier != "knn5" && classifier != "svm" && classifier != "cnn")
    throw std::runtime_error("config: classifier must be knn3|knn5|svm|cnn");
  if (folds < 2) throw std::runtime_error("config: folds must be >= 2");
  if (mode != "independent" && mode != "dependent")
    throw std::runtime_error("config: mode must be independent|dependent");
  if (jobs < 1) throw std::runtime_error("config: jobs must be >= 1");
  if (cnn.optimizer != "adam" && cnn.optimizer != "sgd")
    throw std::runtime_error("config: cnn.optimizer must be adam|sgd");
  if (synthetic.subjects < 0) throw std::runtime_error("config: synthetic.subjects must be >= 0");
  if (synthetic.subjects == 0 && paths.data_dir.empty() && !std::getenv("EEGRID_DATA_DIR") &&
      (paths.montage.empty() || paths.labels.empty() || paths.recordings_dir.empty()))
    throw std::runtime_error(
        "config: set paths.data_dir (or EEGRID_DATA_DIR), or use a synthetic dataset");
}

std::filesystem::path ExperimentConfig::data_dir() const {
  if (!paths.data_dir.empty()) return paths.data_dir;
  if (const char* env = std::getenv("EEGRID_DATA_DIR")) return env;
  return ".";
}

std::filesystem::path ExperimentConfig::output_dir() const { return paths.output_dir; }

std::filesystem::path ExperimentConfig::montage_path() const {
  if (!paths.montage.empty()) return paths.montage;
  if (synthetic.subjects > 0) return {};  // builtin
  return data_dir() / "montage.csv";
}

std::filesystem::path ExperimentConfig::labels_path() const {
  if (!paths.labels.empty()) return paths.labels;
  return data_dir() / "labels.csv";
}

std::filesystem::path ExperimentConfig::recordings_dir() const {
  if (!paths.recordings_dir.empty()) return paths.recordings_dir;
  return data_dir() / "recordings";
}

std::string ExperimentConfig::canonical_text() const {
  // Storage locations and the worker count do not define the experiment:
  // the same config run from two directories (or with a different --jobs)
  // must hash identically and reproduce identical reports.
  json j = to_json(*this);
  j.erase("paths");
  j.erase("jobs");
  return j.dump();
}

std::string ExperimentConfig::config_hash() const { return to_hex16(fnv1a64(canonical_text())); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return from_json(j);
}

ExperimentConfig config_from_json_text(const std::string& text) {
  return from_json(json::parse(text));
}

namespace {

void apply_overrides_to_json(json& j,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  for (const auto& [key, value] : overrides) {
    std::string pointer = "/" + key;
    for (auto& ch : pointer) {
      if (ch == '.') ch = '/';
    }
    json parsed;
    if (value.find(',') != std::string::npos) {
      parsed = json::array();
      for (const auto& part : split(value, ','))
        parsed.push_back(json::parse(part, nullptr, false).is_discarded()
                             ? json(part)
                             : json::parse(part));
    } else {
      const json attempt = json::parse(value, nullptr, false);
      parsed = attempt.is_discarded() ? json(value) : attempt;
    }
    j[json::json_pointer(pointer)] = parsed;
  }
}

}  // namespace

ExperimentConfig apply_overrides(
    const ExperimentConfig& base,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json j = to_json(base);
  apply_overrides_to_json(j, overrides);
  return from_json(j);
}

ExperimentConfig build_config(const std::string& config_file_or_empty,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
  json j = json::object();
  if (!config_file_or_empty.empty()) {
    std::ifstream in(config_file_or_empty);
    if (!in) throw std::runtime_error("cannot open config " + config_file_or_empty);
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw std::runtime_error(config_file_or_empty + ": " + e.what());
    }
  }
  apply_overrides_to_json(j, overrides);
  return from_json(j);
}

}  // namespace eegrid
