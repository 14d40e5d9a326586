#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eegrid/recording.hpp"
#include "eegrid/synthetic.hpp"
#include "eegrid/util.hpp"

using namespace eegrid;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "eegrid_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
  const auto path = temp_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("csv recording loads with declared shape") {
  const auto path = write_file("small.csv",
                               "subject,s01\n"
                               "trial,rest\n"
                               "rate_hz,128\n"
                               "channels,C3,C4\n"
                               "1,2,3,4\n"
                               "5,6,7,8\n");
  const RawRecording rec = load_recording(path, RecordingFormat::Csv);
  CHECK(rec.subject_id == "s01");
  CHECK(rec.trial_id == "rest");
  CHECK(rec.sample_rate_hz == 128.0);
  CHECK(rec.channel_count() == 2);
  CHECK(rec.sample_count() == 4);
  CHECK(rec.data.at(0, 0) == 1.0);
  CHECK(rec.data.at(1, 3) == 8.0);
  // channel order equals header order, never silently reordered
  CHECK(rec.channels == std::vector<std::string>{"C3", "C4"});
}

TEST_CASE("ragged rows are rejected") {
  const auto path = write_file("ragged.csv",
                               "subject,s01\n"
                               "trial,rest\n"
                               "rate_hz,128\n"
                               "channels,C3,C4\n"
                               "1,2,3,4\n"
                               "5,6,7\n");
  CHECK_THROWS_WITH_AS(load_recording(path, RecordingFormat::Csv),
                       doctest::Contains("ragged"), std::runtime_error);
}

TEST_CASE("non-finite samples are rejected") {
  const auto path = write_file("nan.csv",
                               "subject,s01\ntrial,rest\nrate_hz,128\nchannels,C3\n1,nan,3\n");
  CHECK_THROWS(load_recording(path, RecordingFormat::Csv));
}

TEST_CASE("malformed header is rejected with file context") {
  const auto path = write_file("badheader.csv", "subj,s01\ntrial,t\nrate_hz,128\nchannels,C3\n1\n");
  try {
    load_recording(path, RecordingFormat::Csv);
    FAIL("expected a header error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("badheader.csv") != std::string::npos);
    CHECK(msg.find("header") != std::string::npos);
  }
}

TEST_CASE("34-channel recording pairs with the 34-entry montage") {
  const Montage montage = builtin_montage_sad34();
  RawRecording rec;
  rec.subject_id = "s01";
  rec.trial_id = "rest";
  rec.sample_rate_hz = 128.0;
  rec.channels = montage.names;
  rec.data = Matrix(34, 8, 1.0);
  rec.validate();
  CHECK(rec.channel_count() == 34);
  const RawRecording aligned = align_to_montage(rec, montage);
  CHECK(aligned.channels == montage.names);
}

TEST_CASE("raw_f32 round-trip is bit-exact") {
  Rng rng(42);
  RawRecording rec;
  rec.subject_id = "subj-7";
  rec.trial_id = "video3";
  rec.sample_rate_hz = 512.0;
  rec.channels = {"Fp1", "Fp2", "Cz"};
  rec.data = Matrix(3, 257);
  for (auto& x : rec.data.v) x = static_cast<double>(static_cast<float>(rng.normal() * 50.0));

  const auto path = temp_dir() / "roundtrip.eegr";
  save_recording(rec, path, RecordingFormat::RawF32);
  const RawRecording loaded = load_recording(path, RecordingFormat::RawF32);
  CHECK(loaded.subject_id == rec.subject_id);
  CHECK(loaded.trial_id == rec.trial_id);
  CHECK(loaded.sample_rate_hz == rec.sample_rate_hz);
  CHECK(loaded.channels == rec.channels);
  REQUIRE(loaded.data.v.size() == rec.data.v.size());
  for (std::size_t i = 0; i < rec.data.v.size(); ++i) CHECK(loaded.data.v[i] == rec.data.v[i]);
}

TEST_CASE("csv save/load round-trip preserves f32 samples") {
  Rng rng(7);
  RawRecording rec;
  rec.subject_id = "s02";
  rec.trial_id = "rest";
  rec.sample_rate_hz = 128.0;
  rec.channels = {"C3", "C4"};
  rec.data = Matrix(2, 50);
  for (auto& x : rec.data.v) x = static_cast<double>(static_cast<float>(rng.normal()));
  const auto path = temp_dir() / "roundtrip.csv";
  save_recording(rec, path, RecordingFormat::Csv);
  const RawRecording loaded = load_recording(path, RecordingFormat::Csv);
  for (std::size_t i = 0; i < rec.data.v.size(); ++i) CHECK(loaded.data.v[i] == rec.data.v[i]);
}

TEST_CASE("montage loader validates entries") {
  SUBCASE("34 valid lines") {
    std::string content = "name,x,y\n";
    const Montage builtin = builtin_montage_sad34();
    for (std::size_t i = 0; i < builtin.size(); ++i) {
      content += builtin.names[i] + "," + std::to_string(builtin.positions[i].first) + "," +
                 std::to_string(builtin.positions[i].second) + "\n";
    }
    const Montage m = load_montage(write_file("montage34.csv", content));
    CHECK(m.size() == 34);
    CHECK(m.names == builtin.names);
  }
  SUBCASE("duplicate electrode name") {
    const auto path = write_file("dup.csv", "Cz,0.5,0.5\nCz,0.6,0.5\n");
    CHECK_THROWS_WITH_AS(load_montage(path), doctest::Contains("duplicate"), std::runtime_error);
  }
  SUBCASE("coordinate outside [0,1]") {
    const auto path = write_file("range.csv", "Cz,1.2,0.5\n");
    CHECK_THROWS_WITH_AS(load_montage(path), doctest::Contains("outside"), std::runtime_error);
  }
}

TEST_CASE("shipped montage files match the builtin tables") {
  // data/ lives next to the source tree; tests run from the build tree.
  const auto data = std::filesystem::path(EEGRID_SOURCE_DIR) / "data";
  const Montage sad = load_montage(data / "montage_sad34.csv");
  const Montage builtin = builtin_montage_sad34();
  REQUIRE(sad.size() == builtin.size());
  for (std::size_t i = 0; i < sad.size(); ++i) {
    CHECK(sad.names[i] == builtin.names[i]);
    CHECK(sad.positions[i].first == doctest::Approx(builtin.positions[i].first).epsilon(1e-15));
    CHECK(sad.positions[i].second == doctest::Approx(builtin.positions[i].second).epsilon(1e-15));
  }
  const Montage deap = load_montage(data / "montage_deap32.csv");
  CHECK(deap.size() == 32);
  CHECK(deap.names == builtin_montage_deap32().names);
}

TEST_CASE("rating binarization follows the threshold rule") {
  RatingTable ratings;
  ratings.values[{"s1", "v1"}] = 5.0;
  ratings.values[{"s1", "v2"}] = 4.9;
  ratings.values[{"s1", "v3"}] = 9.0;
  ratings.values[{"s2", "v1"}] = 1.0;  // pre-binarized, passes through
  ratings.values[{"s2", "v2"}] = 0.0;
  const LabelSet labels = binarize_ratings(ratings, Task::Valence);
  CHECK(labels.labels.at({"s1", "v1"}) == 1);
  CHECK(labels.labels.at({"s1", "v2"}) == 0);
  CHECK(labels.labels.at({"s1", "v3"}) == 1);
  CHECK(labels.labels.at({"s2", "v1"}) == 1);
  CHECK(labels.labels.at({"s2", "v2"}) == 0);
}

TEST_CASE("apply_labels rejects unlabeled recordings") {
  RawRecording rec;
  rec.subject_id = "s9";
  rec.trial_id = "rest";
  rec.sample_rate_hz = 128.0;
  rec.channels = {"Cz"};
  rec.data = Matrix(1, 4, 0.5);
  LabelSet labels;
  labels.task = Task::Sad;
  CHECK_THROWS_WITH_AS(apply_labels({rec}, labels), doctest::Contains("no label"),
                       std::runtime_error);
  labels.labels[{"s9", "rest"}] = 1;
  const auto labeled = apply_labels({rec}, labels);
  REQUIRE(labeled.size() == 1);
  CHECK(labeled.front().label == 1);
}

TEST_CASE("label csv loader parses subject,trial,rating") {
  const auto path = write_file("labels.csv", "subject,trial,rating\ns1,v1,7.5\ns1,v2,2\n");
  const RatingTable table = load_ratings(path);
  CHECK(table.values.at({"s1", "v1"}) == 7.5);
  CHECK(table.values.at({"s1", "v2"}) == 2.0);
}
