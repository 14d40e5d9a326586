#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eegrid/matrix.hpp"

namespace eegrid {

// Multichannel recording. Samples are held as doubles for downstream math,
// but both loaders quantize values to 32-bit floats on the way in, so a
// loaded recording round-trips bit-exactly through the raw_f32 container.
struct RawRecording {
  std::string subject_id;
  std::string trial_id;
  double sample_rate_hz{0.0};
  std::vector<std::string> channels;  // row order of `data`
  Matrix data;                        // M x T, microvolts

  std::size_t channel_count() const { return channels.size(); }
  std::size_t sample_count() const { return data.cols; }

  // Throws std::runtime_error on any invariant violation (empty data,
  // duplicate channel names, non-positive rate, non-finite samples).
  void validate() const;
};

// Named electrodes with normalized 2D scalp positions, file order preserved.
struct Montage {
  std::vector<std::string> names;
  std::vector<std::pair<double, double>> positions;  // (x, y), each in [0, 1]

  std::size_t size() const { return names.size(); }
  int index_of(const std::string& name) const;  // -1 when absent
};

enum class Task { Sad, Valence, Arousal };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

// Raw per-(subject, trial) values as read from the label CSV: either
// self-assessment ratings (DEAP style, 1-9) or pre-binarized 0/1 labels.
struct RatingTable {
  std::map<std::pair<std::string, std::string>, double> values;
};

struct LabelSet {
  Task task{Task::Sad};
  std::map<std::pair<std::string, std::string>, int> labels;  // values are 0/1
};

struct LabeledRecording {
  RawRecording recording;
  int label{0};
};

enum class RecordingFormat { Csv, RawF32 };

// CSV layout: four header lines (subject, trial, rate_hz, channels) followed
// by one comma-separated row of samples per channel, in header order.
RawRecording load_recording(const std::filesystem::path& path, RecordingFormat format);
void save_recording(const RawRecording& rec, const std::filesystem::path& path,
                    RecordingFormat format);

// Montage CSV: `name,x,y` per line, x and y in [0, 1]. A leading `name,x,y`
// header line and `#` comments are skipped.
Montage load_montage(const std::filesystem::path& path);

// Label CSV: `subject,trial,rating` per line, optional header.
RatingTable load_ratings(const std::filesystem::path& path);

// Rating >= threshold maps to 1, below to 0. Values that are exactly 0 or 1
// are taken as pre-binarized labels and pass through unchanged.
LabelSet binarize_ratings(const RatingTable& ratings, Task task, double threshold = 5.0);

// Pairs each recording with its binary label; throws if a recording has no
// label entry.
std::vector<LabeledRecording> apply_labels(std::vector<RawRecording> recordings,
                                           const LabelSet& labels);
std::vector<LabeledRecording> apply_labels(std::vector<RawRecording> recordings,
                                           const RatingTable& ratings, Task task,
                                           double threshold = 5.0);

// Reorders recording rows to montage order. Requires the recording's channel
// set to equal the montage's; throws otherwise. Never happens implicitly.
RawRecording align_to_montage(const RawRecording& rec, const Montage& montage);

}  // namespace eegrid
