#pragma once

// Frequency-tagged pulse-train detector record and digital lock-in demodulation.

#include <complex>
#include <span>
#include <vector>

#include "mdcs/pathway_engine.hpp"

namespace mdcs {

struct BeatComponent {
  PhaseSignature signature{};
  std::complex<double> amplitude;
};

struct RawTrainRecord {
  double sample_rate_msps = 1.0;
  double repetition_rate_mhz = 76.0;
  TagSet tags;
  std::vector<double> series;

  double duration_s() const {
    return static_cast<double>(series.size()) / (sample_rate_msps * 1e6);
  }
};

// Rephasing plus the other fourth-order tag combinations that reach a
// square-law detector (non-rephasing, two-quantum and their conjugates, and
// the linear pulse-pair beats), with the given amplitude on every non-rephasing
// component.
std::vector<BeatComponent> fourth_order_beats(std::complex<double> rephasing,
                                              std::complex<double> others);

// x(t_j) = dc + Re sum_k A_k exp(i 2 pi f_k t_j), f_k = signature_frequency(s_k).
// The detector integrates whole pulses, so the sample rate may not exceed the
// repetition rate. Throws AliasError unless sample_rate > 4 max|f_k|, and
// InsufficientRecord if the record is shorter than two periods of the slowest
// nonzero beat.
RawTrainRecord simulate_pulse_train(std::span<const BeatComponent> beats, const TagSet& tags,
                                    double duration_s, double sample_rate_msps,
                                    double repetition_rate_mhz = 76.0, double dc = 0.0);

// Mixes with exp(-i 2 pi f_ref t), low-pass filters through four cascaded
// single-pole stages of corner `bandwidth_khz` and returns twice the final
// filter output. Throws AliasError if the reference is beyond Nyquist and
// InsufficientRecord if the record is shorter than 10 / bandwidth.
std::complex<double> demodulate(const RawTrainRecord& record, double reference_mhz,
                                double bandwidth_khz);

// |H(df)| of the demodulation filter in the continuous-time limit.
double lockin_filter_gain(double offset_khz, double bandwidth_khz);

}  // namespace mdcs
