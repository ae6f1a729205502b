#include "mdcs/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mdcs/errors.hpp"
#include "text_util.hpp"

namespace mdcs {

namespace {

constexpr char kMagic[7] = {'M', 'D', 'C', 'S', '2', 'D', '\0'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(b, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view b) : bytes_(b) {}

  template <class T>
  T get() {
    need(sizeof(T));
    char b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoFailure("dataset: truncated file");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void put_axis(std::string& out, const AxisDescriptor& a) {
  if (a.label.size() > 0xffff) throw InvalidSpec("dataset: axis label too long");
  put<std::uint64_t>(out, a.count);
  put<double>(out, a.start);
  put<double>(out, a.step);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(a.label.size()));
  out += a.label;
}

AxisDescriptor get_axis(Reader& r) {
  AxisDescriptor a;
  a.count = r.get<std::uint64_t>();
  a.start = r.get<double>();
  a.step = r.get<double>();
  a.label = std::string(r.take(r.get<std::uint16_t>()));
  return a;
}

double axis_step(const std::vector<double>& axis) { return axis.size() > 1 ? axis[1] - axis[0] : 0.0; }

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string encode_dataset(const DatasetFile& d) {
  if (d.rows.count * d.cols.count != d.values.size())
    throw InvalidSpec("dataset: axis lengths do not match the matrix size");
  std::string meta;
  for (const auto& [k, v] : d.metadata) {
    if (k.empty() || k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw InvalidSpec("dataset: metadata key '" + k + "' or its value is not representable");
    meta += k + "=" + v + "\n";
  }
  std::string out;
  out.reserve(64 + meta.size() + d.values.size() * 8);
  out.append(kMagic, sizeof kMagic);
  put<std::uint16_t>(out, d.version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  put_axis(out, d.rows);
  put_axis(out, d.cols);
  for (const auto& z : d.values) {
    put<float>(out, z.real());
    put<float>(out, z.imag());
  }
  put<std::uint32_t>(out, crc32_of(out));
  return out;
}

DatasetFile decode_dataset(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 2 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw IoFailure("dataset: bad magic");
  Reader r(bytes.substr(sizeof kMagic));
  DatasetFile d;
  d.version = r.get<std::uint16_t>();
  if (d.version == 0 || d.version > kDatasetVersion)
    throw VersionUnsupported("dataset: version " + std::to_string(d.version) + " is not supported");
  if (bytes.size() < sizeof kMagic + 2 + 4) throw IoFailure("dataset: truncated file");
  {
    // Length implied by the header, so that a short file reads as truncated
    // rather than corrupt.
    Reader h(bytes.substr(sizeof kMagic + 2));
    h.take(h.get<std::uint32_t>());
    const auto rows = get_axis(h).count, cols = get_axis(h).count;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 8;
    if (cols != 0 && rows > limit / cols) throw IoFailure("dataset: axis sizes overflow");
    if (h.remaining() < rows * cols * 8 + 4) throw IoFailure("dataset: truncated file");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.get<std::uint32_t>() != crc32_of(body)) throw ChecksumMismatch("dataset: checksum mismatch");

  Reader b(body.substr(sizeof kMagic + 2));
  const std::string meta(b.take(b.get<std::uint32_t>()));
  std::istringstream ms(meta);
  std::string line;
  while (std::getline(ms, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoFailure("dataset: malformed metadata line");
    d.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  d.rows = get_axis(b);
  d.cols = get_axis(b);
  const std::uint64_t n = d.rows.count * d.cols.count;
  if (b.remaining() != n * 8) throw IoFailure("dataset: payload size does not match the axes");
  d.values.resize(n);
  for (auto& z : d.values) {
    const float re = b.get<float>();
    const float im = b.get<float>();
    z = {re, im};
  }
  return d;
}

void write_dataset(const std::string& path, const DatasetFile& data) {
  const std::string bytes = encode_dataset(data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write to '" + path + "' failed");
}

DatasetFile read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_dataset(ss.str());
}

DatasetFile to_dataset(const TimeDomainSignal& s) {
  DatasetFile d;
  d.metadata = s.metadata;
  d.metadata["kind"] = "time_domain";
  d.metadata["waiting_time_ps"] = detail::exact(s.waiting_time_ps);
  d.metadata["detection"] = to_string(s.mode);
  d.metadata["frame_thz"] = detail::exact(s.frame_thz);
  d.rows = {s.grid.n_tau, 0.0, s.grid.tau_step_ps, "tau [ps]"};
  d.cols = {s.grid.n_t, 0.0, s.grid.t_step_ps, "t [ps]"};
  d.values.resize(static_cast<std::size_t>(s.data.size()));
  for (Eigen::Index i = 0; i < s.data.size(); ++i)
    d.values[static_cast<std::size_t>(i)] = std::complex<float>(s.data.data()[i]);
  return d;
}

DatasetFile to_dataset(const Spectrum2D& s) {
  DatasetFile d;
  d.metadata = s.metadata;
  d.metadata["kind"] = "spectrum";
  d.metadata["frame_thz"] = detail::exact(s.frame_thz);
  d.metadata["pad_factor"] = std::to_string(s.pad_factor);
  d.rows = {s.nu_tau_thz.size(), s.nu_tau_thz.empty() ? 0.0 : s.nu_tau_thz.front(),
            axis_step(s.nu_tau_thz), "nu_tau [THz]"};
  d.cols = {s.nu_t_thz.size(), s.nu_t_thz.empty() ? 0.0 : s.nu_t_thz.front(), axis_step(s.nu_t_thz),
            "nu_t [THz]"};
  d.values.resize(static_cast<std::size_t>(s.data.size()));
  for (Eigen::Index i = 0; i < s.data.size(); ++i)
    d.values[static_cast<std::size_t>(i)] = std::complex<float>(s.data.data()[i]);
  return d;
}

namespace {

double meta_number(const DatasetFile& d, const std::string& key, double fallback) {
  const auto it = d.metadata.find(key);
  return it == d.metadata.end() ? fallback : std::stod(it->second);
}

}  // namespace

TimeDomainSignal signal_from_dataset(const DatasetFile& d) {
  const auto kind = d.metadata.find("kind");
  if (kind != d.metadata.end() && kind->second != "time_domain")
    throw InvalidSpec("dataset holds a " + kind->second + ", not a time-domain signal");
  TimeDomainSignal s;
  s.grid = {d.rows.count, d.cols.count, d.rows.step, d.cols.step};
  s.metadata = d.metadata;
  s.waiting_time_ps = meta_number(d, "waiting_time_ps", 0.0);
  s.frame_thz = meta_number(d, "frame_thz", 0.0);
  const auto det = d.metadata.find("detection");
  s.mode = det != d.metadata.end() && det->second == "pl" ? Detection::Photoluminescence
                                                          : Detection::Heterodyne;
  s.data.resize(static_cast<Eigen::Index>(d.rows.count), static_cast<Eigen::Index>(d.cols.count));
  for (std::size_t i = 0; i < d.values.size(); ++i)
    s.data.data()[i] = Complex(d.values[i].real(), d.values[i].imag());
  return s;
}

Spectrum2D spectrum_from_dataset(const DatasetFile& d) {
  const auto kind = d.metadata.find("kind");
  if (kind == d.metadata.end() || kind->second != "spectrum")
    throw InvalidSpec("dataset does not hold a spectrum");
  Spectrum2D s;
  s.metadata = d.metadata;
  s.frame_thz = meta_number(d, "frame_thz", 0.0);
  s.pad_factor = static_cast<int>(meta_number(d, "pad_factor", 1.0));
  for (std::uint64_t i = 0; i < d.rows.count; ++i)
    s.nu_tau_thz.push_back(d.rows.start + static_cast<double>(i) * d.rows.step);
  for (std::uint64_t i = 0; i < d.cols.count; ++i)
    s.nu_t_thz.push_back(d.cols.start + static_cast<double>(i) * d.cols.step);
  s.data.resize(static_cast<Eigen::Index>(d.rows.count), static_cast<Eigen::Index>(d.cols.count));
  for (std::size_t i = 0; i < d.values.size(); ++i)
    s.data.data()[i] = Complex(d.values[i].real(), d.values[i].imag());
  return s;
}

}  // namespace mdcs
