#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace eegrid {

struct InterpSettings {
  std::string method{"idw_nearest_border"};
  double d_max{3.0};
  double idw_power{1.0};
};

struct SvmSettings {
  std::vector<double> c_grid{0.1, 1.0, 10.0};
  std::vector<double> sigma_grid{0.2, 0.4, 0.8};
  double tol{1e-3};
};

struct CnnSettings {
  int batch_size{32};
  double learning_rate{1e-3};
  int max_epochs{30};
  int patience{5};
  std::string optimizer{"adam"};  // adam | sgd
};

// subjects == 0 means "read recordings from disk"; > 0 switches the run to
// the generated planted-signal dataset.
struct SyntheticSettings {
  int subjects{0};
  double seconds{60.0};
  double tone_hz{10.0};
  double tone_amplitude{1.0};
  double noise_amplitude{1.0};
  double fingerprint_amplitude{2.0};
  double jitter_radius{0.18};
};

struct PathSettings {
  std::string data_dir;  // falls back to $EEGRID_DATA_DIR, then "."
  std::string output_dir{"out"};
  std::string montage;         // default <data_dir>/montage.csv, builtin for synthetic runs
  std::string labels;          // default <data_dir>/labels.csv
  std::string recordings_dir;  // default <data_dir>/recordings
};

struct ExperimentConfig {
  std::string task{"sad"};  // sad | valence | arousal
  int model{1};
  std::string features{"energy_entropy"};  // energy | energy_entropy
  double window_seconds{5.0};
  double shift_seconds{5.0};
  double baseline_trim_seconds{0.0};
  int grid_size{15};
  InterpSettings interpolation;
  std::string augmentation{"none"};  // none | one_pixel | one_and_two
  std::string classifier{"knn3"};    // knn3 | knn5 | svm | cnn
  int folds{8};
  std::string mode{"independent"};  // independent | dependent
  std::uint64_t seed{42};
  int jobs{1};
  SvmSettings svm;
  CnnSettings cnn;
  SyntheticSettings synthetic;
  PathSettings paths;

  void validate() const;

  // Effective data locations after defaulting rules.
  std::filesystem::path data_dir() const;
  std::filesystem::path output_dir() const;
  std::filesystem::path montage_path() const;     // empty => builtin montage
  std::filesystem::path labels_path() const;
  std::filesystem::path recordings_dir() const;

  // Canonical sorted-key JSON with every field present except storage paths
  // and the worker count; the 64-bit FNV-1a of this text is the config hash
  // embedded in reports and manifests.
  std::string canonical_text() const;
  std::string config_hash() const;
};

// Reads a JSON config. Window/shift/trim defaults are task-sensitive: sad
// gets 5/5/0, valence and arousal get 4/2/3, unless the file sets them.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);

// Applies `key=value` overrides where key is the (dotted) config key, e.g.
// "classifier=svm" or "interpolation.d_max=2.5". Values parse as JSON when
// possible, comma lists become arrays, anything else stays a string.
ExperimentConfig apply_overrides(const ExperimentConfig& base,
                                 const std::vector<std::pair<std::string, std::string>>& overrides);

// Config file (optional) plus overrides, applied before the task-sensitive
// defaulting so `--task=valence` alone still picks the 4/2/3 windowing.
ExperimentConfig build_config(const std::string& config_file_or_empty,
                              const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace eegrid
