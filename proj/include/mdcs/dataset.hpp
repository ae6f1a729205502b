#pragma once

// Binary dataset container:
//
//   "MDCS2D\0"            7 bytes magic
//   uint16 version        little endian, currently 1
//   uint32 n, n bytes     UTF-8 metadata, "key=value\n" lines
//   2 x axis descriptor   uint64 count, f64 start, f64 step, uint16 n, n bytes label
//   rows*cols x complex64 row-major, float32 re then im, little endian
//   uint32 CRC-32         over every preceding byte

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdcs/response_synth.hpp"
#include "mdcs/spectral_transform.hpp"

namespace mdcs {

inline constexpr std::uint16_t kDatasetVersion = 1;

struct AxisDescriptor {
  std::uint64_t count = 0;
  double start = 0.0;
  double step = 0.0;
  std::string label;

  bool operator==(const AxisDescriptor&) const = default;
};

struct DatasetFile {
  std::uint16_t version = kDatasetVersion;
  std::map<std::string, std::string> metadata;
  AxisDescriptor rows;
  AxisDescriptor cols;
  std::vector<std::complex<float>> values;

  bool operator==(const DatasetFile&) const = default;
};

std::string encode_dataset(const DatasetFile& data);
// Throws IoFailure on truncation or bad magic, VersionUnsupported, ChecksumMismatch.
DatasetFile decode_dataset(std::string_view bytes);

void write_dataset(const std::string& path, const DatasetFile& data);
DatasetFile read_dataset(const std::string& path);

DatasetFile to_dataset(const TimeDomainSignal& signal);
DatasetFile to_dataset(const Spectrum2D& spectrum);
TimeDomainSignal signal_from_dataset(const DatasetFile& data);
Spectrum2D spectrum_from_dataset(const DatasetFile& data);

std::uint32_t crc32_of(std::string_view bytes);

}  // namespace mdcs
