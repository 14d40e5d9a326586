#include "eegrid/recording.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eegrid/binio.hpp"
#include "eegrid/util.hpp"

namespace eegrid {

namespace {

// First 8 bytes identify the container family, the rest is reserved padding.
constexpr char kMagic[16] = {'E', 'E', 'G', 'R', 'I', 'D', '0', '1',
                             0,   0,   0,   0,   0,   0,   0,   0};
constexpr std::uint32_t kKindRecording = 1;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& message) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + message);
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

// All sample values pass through f32 so that the CSV and raw_f32 formats
// agree on precision and save/load round-trips are bit-exact.
double quantize_f32(double x) { return static_cast<double>(static_cast<float>(x)); }

RawRecording load_recording_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, false);
  RawRecording rec;
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) fail(path, lineno, std::string("missing ") + what + " line");
    ++lineno;
    return split(line, ',');
  };

  auto subject = next_line("subject");
  if (subject.size() != 2 || trim(subject[0]) != "subject")
    fail(path, lineno, "malformed header: expected 'subject,<id>'");
  rec.subject_id = trim(subject[1]);

  auto trial = next_line("trial");
  if (trial.size() != 2 || trim(trial[0]) != "trial")
    fail(path, lineno, "malformed header: expected 'trial,<id>'");
  rec.trial_id = trim(trial[1]);

  auto rate = next_line("rate_hz");
  if (rate.size() != 2 || trim(rate[0]) != "rate_hz")
    fail(path, lineno, "malformed header: expected 'rate_hz,<value>'");
  rec.sample_rate_hz = parse_double_strict(rate[1], path.string() + ":" + std::to_string(lineno));

  auto channels = next_line("channels");
  if (channels.size() < 2 || trim(channels[0]) != "channels")
    fail(path, lineno, "malformed header: expected 'channels,<name>,...'");
  for (std::size_t i = 1; i < channels.size(); ++i) {
    const std::string name = trim(channels[i]);
    if (name.empty()) fail(path, lineno, "empty channel name");
    rec.channels.push_back(name);
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      row.push_back(quantize_f32(
          parse_double_strict(cell, path.string() + ":" + std::to_string(lineno))));
    }
    rows.push_back(std::move(row));
  }

  if (rows.size() != rec.channels.size())
    fail(path, lineno, "expected " + std::to_string(rec.channels.size()) + " channel rows, got " +
                           std::to_string(rows.size()));
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) fail(path, lineno, "ragged rows");
  }

  rec.data = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), rec.data.row(r).begin());
  rec.validate();
  return rec;
}

RawRecording load_recording_raw(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, true);
  char magic[16];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(path.string() + ": not an EEGRID01 container");
  const auto kind = binio::read_pod<std::uint32_t>(in, "container kind");
  if (kind != kKindRecording)
    throw std::runtime_error(path.string() + ": container does not hold a recording");

  RawRecording rec;
  rec.subject_id = binio::read_string(in, "subject id");
  rec.trial_id = binio::read_string(in, "trial id");
  rec.sample_rate_hz = binio::read_pod<double>(in, "sample rate");
  const auto m = binio::read_pod<std::uint32_t>(in, "channel count");
  for (std::uint32_t i = 0; i < m; ++i)
    rec.channels.push_back(binio::read_string(in, "channel name"));
  const auto t = binio::read_pod<std::uint64_t>(in, "sample count");
  rec.data = Matrix(m, t);
  for (auto& x : rec.data.v) x = static_cast<double>(binio::read_pod<float>(in, "sample"));
  rec.validate();
  return rec;
}

void save_recording_csv(const RawRecording& rec, const std::filesystem::path& path) {
  std::ofstream out = open_output(path, false);
  out << "subject," << rec.subject_id << "\n";
  out << "trial," << rec.trial_id << "\n";
  std::ostringstream rate;
  rate.precision(17);
  rate << rec.sample_rate_hz;
  out << "rate_hz," << rate.str() << "\n";
  out << "channels";
  for (const auto& name : rec.channels) out << "," << name;
  out << "\n";
  for (std::size_t r = 0; r < rec.channel_count(); ++r) {
    std::ostringstream row;
    row.precision(9);  // enough to round-trip f32
    for (std::size_t c = 0; c < rec.sample_count(); ++c) {
      if (c) row << ",";
      row << static_cast<float>(rec.data.at(r, c));
    }
    out << row.str() << "\n";
  }
}

void save_recording_raw(const RawRecording& rec, const std::filesystem::path& path) {
  std::ofstream out = open_output(path, true);
  out.write(kMagic, sizeof(kMagic));
  binio::write_pod<std::uint32_t>(out, kKindRecording);
  binio::write_string(out, rec.subject_id);
  binio::write_string(out, rec.trial_id);
  binio::write_pod<double>(out, rec.sample_rate_hz);
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(rec.channel_count()));
  for (const auto& name : rec.channels) binio::write_string(out, name);
  binio::write_pod<std::uint64_t>(out, rec.sample_count());
  for (double x : rec.data.v) binio::write_pod<float>(out, static_cast<float>(x));
}

}  // namespace

void RawRecording::validate() const {
  if (channels.empty()) throw std::runtime_error("recording has no channels");
  if (sample_rate_hz <= 0.0) throw std::runtime_error("sample_rate_hz must be positive");
  if (data.rows != channels.size())
    throw std::runtime_error("data row count does not match channel list");
  if (data.cols < 1) throw std::runtime_error("recording has no samples");
  std::set<std::string> seen;
  for (const auto& name : channels) {
    if (!seen.insert(name).second)
      throw std::runtime_error("duplicate channel name '" + name + "'");
  }
  for (double x : data.v) {
    if (!std::isfinite(x)) throw std::runtime_error("non-finite sample value");
  }
}

int Montage::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string task_name(Task t) {
  switch (t) {
    case Task::Sad: return "sad";
    case Task::Valence: return "valence";
    case Task::Arousal: return "arousal";
  }
  return "sad";
}

Task task_from_name(const std::string& name) {
  if (name == "sad") return Task::Sad;
  if (name == "valence") return Task::Valence;
  if (name == "arousal") return Task::Arousal;
  throw std::runtime_error("unknown task '" + name + "' (expected sad|valence|arousal)");
}

RawRecording load_recording(const std::filesystem::path& path, RecordingFormat format) {
  return format == RecordingFormat::Csv ? load_recording_csv(path) : load_recording_raw(path);
}

void save_recording(const RawRecording& rec, const std::filesystem::path& path,
                    RecordingFormat format) {
  rec.validate();
  if (format == RecordingFormat::Csv)
    save_recording_csv(rec, path);
  else
    save_recording_raw(rec, path);
}

Montage load_montage(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, false);
  Montage montage;
  std::set<std::string> names;
  std::set<std::pair<double, double>> positions;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != 3) fail(path, lineno, "expected 'name,x,y'");
    const std::string name = trim(cells[0]);
    if (lineno == 1 && name == "name") continue;  // optional header line
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    const double x = parse_double_strict(cells[1], ctx);
    const double y = parse_double_strict(cells[2], ctx);
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
      fail(path, lineno, "coordinate outside [0,1] for electrode '" + name + "'");
    if (!names.insert(name).second) fail(path, lineno, "duplicate electrode name '" + name + "'");
    if (!positions.insert({x, y}).second)
      fail(path, lineno, "duplicate electrode position for '" + name + "'");
    montage.names.push_back(name);
    montage.positions.emplace_back(x, y);
  }
  if (montage.names.empty()) throw std::runtime_error(path.string() + ": empty montage");
  return montage;
}

RatingTable load_ratings(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, false);
  RatingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != 3) fail(path, lineno, "expected 'subject,trial,rating'");
    if (lineno == 1 && trim(cells[0]) == "subject") continue;
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    const auto key = std::make_pair(trim(cells[0]), trim(cells[1]));
    if (table.values.count(key))
      fail(path, lineno, "duplicate label entry for (" + key.first + ", " + key.second + ")");
    table.values[key] = parse_double_strict(cells[2], ctx);
  }
  return table;
}

LabelSet binarize_ratings(const RatingTable& ratings, Task task, double threshold) {
  LabelSet out;
  out.task = task;
  for (const auto& [key, value] : ratings.values) {
    int label;
    if (value == 0.0 || value == 1.0) {
      label = static_cast<int>(value);  // pre-binarized
    } else {
      label = value >= threshold ? 1 : 0;
    }
    out.labels[key] = label;
  }
  return out;
}

std::vector<LabeledRecording> apply_labels(std::vector<RawRecording> recordings,
                                           const LabelSet& labels) {
  std::vector<LabeledRecording> out;
  out.reserve(recordings.size());
  for (auto& rec : recordings) {
    const auto it = labels.labels.find({rec.subject_id, rec.trial_id});
    if (it == labels.labels.end())
      throw std::runtime_error("no label entry for (" + rec.subject_id + ", " + rec.trial_id +
                               ")");
    out.push_back({std::move(rec), it->second});
  }
  return out;
}

std::vector<LabeledRecording> apply_labels(std::vector<RawRecording> recordings,
                                           const RatingTable& ratings, Task task,
                                           double threshold) {
  return apply_labels(std::move(recordings), binarize_ratings(ratings, task, threshold));
}

RawRecording align_to_montage(const RawRecording& rec, const Montage& montage) {
  if (rec.channel_count() != montage.size())
    throw std::runtime_error("recording has " + std::to_string(rec.channel_count()) +
                             " channels but montage has " + std::to_string(montage.size()));
  RawRecording out;
  out.subject_id = rec.subject_id;
  out.trial_id = rec.trial_id;
  out.sample_rate_hz = rec.sample_rate_hz;
  out.channels = montage.names;
  out.data = Matrix(montage.size(), rec.sample_count());
  for (std::size_t i = 0; i < montage.size(); ++i) {
    int idx = -1;
    for (std::size_t j = 0; j < rec.channels.size(); ++j) {
      if (rec.channels[j] == montage.names[i]) {
        idx = static_cast<int>(j);
        break;
      }
    }
    if (idx < 0)
      throw std::runtime_error("montage electrode '" + montage.names[i] +
                               "' missing from recording");
    const auto src = rec.data.row(static_cast<std::size_t>(idx));
    std::copy(src.begin(), src.end(), out.data.row(i).begin());
  }
  return out;
}

}  // namespace eegrid
