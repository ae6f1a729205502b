#include "mdcs/lockin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "mdcs/errors.hpp"

namespace mdcs {

std::vector<BeatComponent> fourth_order_beats(std::complex<double> rephasing,
                                              std::complex<double> others) {
  std::vector<BeatComponent> out;
  // One representative per +/- pair: first nonzero entry is -1.
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          const PhaseSignature s{a, b, c, d};
          if (a + b + c + d != 0) continue;
          const auto first = std::find_if(s.begin(), s.end(), [](int v) { return v != 0; });
          if (first == s.end() || *first != -1) continue;
          out.push_back({s, s == kRephasingSignature ? rephasing : others});
        }
  return out;
}

RawTrainRecord simulate_pulse_train(std::span<const BeatComponent> beats, const TagSet& tags,
                                    double duration_s, double sample_rate_msps,
                                    double repetition_rate_mhz, double dc) {
  if (!(duration_s > 0.0)) throw InvalidSpec("pulse train: duration must be positive");
  if (!(repetition_rate_mhz > 0.0)) throw InvalidSpec("pulse train: repetition rate must be positive");
  if (!(sample_rate_msps > 0.0) || sample_rate_msps > repetition_rate_mhz)
    throw InvalidSpec("pulse train: sample rate must be positive and at most the repetition rate");

  std::vector<double> freq_hz;
  double max_f = 0.0, min_f = kInfinity;
  for (const auto& b : beats) {
    const double f = signature_frequency(b.signature, tags) * 1e6;
    freq_hz.push_back(f);
    if (b.amplitude == std::complex<double>{} || f == 0.0) continue;
    max_f = std::max(max_f, std::abs(f));
    min_f = std::min(min_f, std::abs(f));
  }
  const double fs = sample_rate_msps * 1e6;
  if (!(fs > 4.0 * max_f))
    throw AliasError("pulse train: sample rate " + std::to_string(sample_rate_msps) +
                     " MS/s is not above 4x the highest beat " + std::to_string(max_f * 1e-6) +
                     " MHz");
  if (std::isfinite(min_f) && duration_s <= 2.0 / min_f)
    throw InsufficientRecord("pulse train: record shorter than two periods of the slowest beat");

  RawTrainRecord rec;
  rec.sample_rate_msps = sample_rate_msps;
  rec.repetition_rate_mhz = repetition_rate_mhz;
  rec.tags = tags;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  rec.series.assign(n, dc);
  for (std::size_t k = 0; k < beats.size(); ++k) {
    const auto amp = beats[k].amplitude;
    if (amp == std::complex<double>{}) continue;
    const double w = 2.0 * std::numbers::pi * freq_hz[k] / fs;
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce the phase argument before the trig call to keep precision on long records.
      const double ph = std::fmod(w * static_cast<double>(j), 2.0 * std::numbers::pi);
      rec.series[j] += amp.real() * std::cos(ph) - amp.imag() * std::sin(ph);
    }
  }
  return rec;
}

std::complex<double> demodulate(const RawTrainRecord& record, double reference_mhz,
                                double bandwidth_khz) {
  const double fs = record.sample_rate_msps * 1e6;
  const double fref = reference_mhz * 1e6;
  const double bw = bandwidth_khz * 1e3;
  if (!(bw > 0.0)) throw InvalidSpec("demodulate: bandwidth must be positive");
  if (!(std::abs(fref) < 0.5 * fs))
    throw AliasError("demodulate: reference " + std::to_string(reference_mhz) +
                     " MHz is beyond Nyquist");
  if (record.duration_s() < 10.0 / bw)
    throw InsufficientRecord("demodulate: record of " + std::to_string(record.duration_s()) +
                             " s is shorter than 10/bandwidth");

  const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi * bw / fs);
  const double w = 2.0 * std::numbers::pi * fref / fs;
  std::array<std::complex<double>, 4> stage{};
  for (std::size_t j = 0; j < record.series.size(); ++j) {
    const double ph = std::fmod(w * static_cast<double>(j), 2.0 * std::numbers::pi);
    std::complex<double> z = record.series[j] * std::complex<double>(std::cos(ph), -std::sin(ph));
    for (auto& s : stage) {
      s += alpha * (z - s);
      z = s;
    }
  }
  return 2.0 * stage.back();
}

double lockin_filter_gain(double offset_khz, double bandwidth_khz) {
  const double x = offset_khz / bandwidth_khz;
  return 1.0 / (1.0 + x * x) / (1.0 + x * x);
}

}  // namespace mdcs
