#include "eegrid/sample_store.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "eegrid/binio.hpp"

namespace eegrid {

namespace {

constexpr char kMagic[16] = {'E', 'E', 'G', 'R', 'I', 'D', '0', '1',
                             0,   0,   0,   0,   0,   0,   0,   0};
constexpr std::uint32_t kKindFeatureSet = 2;

void write_header(std::ostream& out, const FeatureSetMeta& meta, std::uint64_t sample_count) {
  out.write(kMagic, sizeof(kMagic));
  binio::write_pod<std::uint32_t>(out, kKindFeatureSet);
  binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(meta.model));
  binio::write_string(out, meta.task);
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(meta.feature_layout.size()));
  for (const auto& name : meta.feature_layout) binio::write_string(out, name);
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(meta.channels.size()));
  for (const auto& name : meta.channels) binio::write_string(out, name);
  binio::write_pod<std::int32_t>(out, meta.rows);
  binio::write_pod<std::int32_t>(out, meta.cols);
  binio::write_pod<std::int32_t>(out, meta.depth);
  binio::write_pod<std::uint64_t>(out, sample_count);
}

FeatureSetMeta read_header(std::istream& in, const std::filesystem::path& path,
                           std::uint64_t& sample_count) {
  char magic[16];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(path.string() + ": not an EEGRID01 container");
  const auto kind = binio::read_pod<std::uint32_t>(in, "container kind");
  if (kind != kKindFeatureSet)
    throw std::runtime_error(path.string() + ": container does not hold a feature set");
  FeatureSetMeta meta;
  meta.model = binio::read_pod<std::uint8_t>(in, "model");
  meta.task = binio::read_string(in, "task");
  const auto layout_count = binio::read_pod<std::uint32_t>(in, "layout count");
  for (std::uint32_t i = 0; i < layout_count; ++i)
    meta.feature_layout.push_back(binio::read_string(in, "layout name"));
  const auto channel_count = binio::read_pod<std::uint32_t>(in, "channel count");
  for (std::uint32_t i = 0; i < channel_count; ++i)
    meta.channels.push_back(binio::read_string(in, "channel name"));
  meta.rows = binio::read_pod<std::int32_t>(in, "rows");
  meta.cols = binio::read_pod<std::int32_t>(in, "cols");
  meta.depth = binio::read_pod<std::int32_t>(in, "depth");
  sample_count = binio::read_pod<std::uint64_t>(in, "sample count");
  return meta;
}

void write_sample_info(std::ostream& out, const SampleInfo& info) {
  binio::write_string(out, info.subject_id);
  binio::write_string(out, info.trial_id);
  binio::write_pod<std::int32_t>(out, info.window_index);
  binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(info.label));
}

SampleInfo read_sample_info(std::istream& in) {
  SampleInfo info;
  info.subject_id = binio::read_string(in, "subject id");
  info.trial_id = binio::read_string(in, "trial id");
  info.window_index = binio::read_pod<std::int32_t>(in, "window index");
  info.label = binio::read_pod<std::uint8_t>(in, "label");
  return info;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

void save_feature_matrices(const FeatureSetMeta& meta, const std::vector<FeatureMatrix>& samples,
                           const std::filesystem::path& path) {
  if (meta.model != 1) throw std::runtime_error("feature matrices must use model=1 metadata");
  std::ofstream out = open_out(path);
  write_header(out, meta, samples.size());
  for (const auto& s : samples) {
    if (s.data.rows != static_cast<std::size_t>(meta.rows) ||
        s.data.cols != static_cast<std::size_t>(meta.cols))
      throw std::runtime_error("sample shape does not match feature set metadata");
    write_sample_info(out, s.info);
    binio::write_f32_array(out, s.data.v);
  }
}

void save_feature_grids(const FeatureSetMeta& meta, const std::vector<FeatureGrid>& samples,
                        const std::filesystem::path& path) {
  if (meta.model != 2) throw std::runtime_error("feature grids must use model=2 metadata");
  std::ofstream out = open_out(path);
  write_header(out, meta, samples.size());
  for (const auto& s : samples) {
    if (s.data.d0 != static_cast<std::size_t>(meta.rows) ||
        s.data.d1 != static_cast<std::size_t>(meta.cols) ||
        s.data.d2 != static_cast<std::size_t>(meta.depth))
      throw std::runtime_error("sample shape does not match feature set metadata");
    write_sample_info(out, s.info);
    binio::write_f32_array(out, s.data.v);
  }
}

FeatureSetMeta peek_feature_set(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::uint64_t count = 0;
  return read_header(in, path, count);
}

std::vector<FeatureMatrix> load_feature_matrices(const std::filesystem::path& path,
                                                 FeatureSetMeta* meta_out) {
  std::ifstream in = open_in(path);
  std::uint64_t count = 0;
  const FeatureSetMeta meta = read_header(in, path, count);
  if (meta.model != 1)
    throw std::runtime_error(path.string() + " holds model-2 grids, not matrices");
  std::vector<FeatureMatrix> samples;
  samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    FeatureMatrix s;
    s.info = read_sample_info(in);
    s.feature_layout = meta.feature_layout;
    s.data = Matrix(static_cast<std::size_t>(meta.rows), static_cast<std::size_t>(meta.cols));
    s.data.v = binio::read_f32_array(in, "sample data");
    if (s.data.v.size() != static_cast<std::size_t>(meta.rows) * meta.cols)
      throw std::runtime_error(path.string() + ": sample payload size mismatch");
    samples.push_back(std::move(s));
  }
  if (meta_out) *meta_out = meta;
  return samples;
}

std::vector<FeatureGrid> load_feature_grids(const std::filesystem::path& path,
                                            FeatureSetMeta* meta_out) {
  std::ifstream in = open_in(path);
  std::uint64_t count = 0;
  const FeatureSetMeta meta = read_header(in, path, count);
  if (meta.model != 2)
    throw std::runtime_error(path.string() + " holds model-1 matrices, not grids");
  std::vector<FeatureGrid> samples;
  samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    FeatureGrid s;
    s.info = read_sample_info(in);
    s.feature_layout = meta.feature_layout;
    s.data = Tensor3(static_cast<std::size_t>(meta.rows), static_cast<std::size_t>(meta.cols),
                     static_cast<std::size_t>(meta.depth));
    s.data.v = binio::read_f32_array(in, "sample data");
    if (s.data.v.size() != static_cast<std::size_t>(meta.rows) * meta.cols * meta.depth)
      throw std::runtime_error(path.string() + ": sample payload size mismatch");
    samples.push_back(std::move(s));
  }
  if (meta_out) *meta_out = meta;
  return samples;
}

}  // namespace eegrid
