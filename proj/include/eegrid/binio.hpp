#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eegrid {

// On-disk integers and floats are little-endian. The pipeline targets
// little-endian hosts; a big-endian port would byte-swap here.
static_assert(std::endian::native == std::endian::little,
              "binary container IO assumes a little-endian host");

namespace binio {

template <typename T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& what) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("unexpected end of file reading " + what);
  return value;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, const std::string& what) {
  const auto n = read_pod<std::uint32_t>(is, what + " length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw std::runtime_error("unexpected end of file reading " + what);
  return s;
}

inline void write_f32_array(std::ostream& os, const std::vector<double>& v) {
  write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(v.size()));
  for (double x : v) write_pod<float>(os, static_cast<float>(x));
}

inline std::vector<double> read_f32_array(std::istream& is, const std::string& what) {
  const auto n = read_pod<std::uint64_t>(is, what + " length");
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(read_pod<float>(is, what));
  return v;
}

}  // namespace binio
}  // namespace eegrid
