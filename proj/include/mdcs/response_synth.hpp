#pragma once

// Time-domain third-order rephasing signal S(tau, T, t) of an emitter ensemble.

#include <Eigen/Core>
#include <complex>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdcs/emitter_model.hpp"
#include "mdcs/pathway_engine.hpp"

namespace mdcs {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TimeGrid {
  std::size_t n_tau = 0;
  std::size_t n_t = 0;
  double tau_step_ps = 1.0;
  double t_step_ps = 1.0;

  static TimeGrid square(std::size_t n, double step_ps) { return {n, n, step_ps, step_ps}; }

  double tau(std::size_t i) const { return static_cast<double>(i) * tau_step_ps; }
  double t(std::size_t j) const { return static_cast<double>(j) * t_step_ps; }
  bool is_square() const { return n_tau == n_t && tau_step_ps == t_step_ps; }
  void validate() const;

  bool operator==(const TimeGrid&) const = default;
};

enum class Detection { Heterodyne, Photoluminescence };

const char* to_string(Detection mode);

struct SynthesisOptions {
  double waiting_time_ps = 0.5;
  Detection mode = Detection::Heterodyne;
  LaserSpectrum laser;
  // Rotating-frame origin. NaN selects the laser center.
  double frame_thz = std::numeric_limits<double>::quiet_NaN();
  double noise_rms = 0.0;  // complex white noise, RMS per grid point
  std::uint64_t noise_seed = 0;
  unsigned threads = 1;
  PathwayOptions pathways;

  double frame() const { return std::isnan(frame_thz) ? laser.center_thz : frame_thz; }
};

struct TimeDomainSignal {
  TimeGrid grid;
  double waiting_time_ps = 0.0;
  Detection mode = Detection::Heterodyne;
  double frame_thz = 0.0;
  ComplexMatrix data;  // rows: tau, columns: t
  std::map<std::string, std::string> metadata;
};

// One pathway of one emitter, reduced to the separable form
//   weight * exp((+i 2 pi d_exc - g) tau) * exp((-i 2 pi d_emit - g) t).
struct ResponseTerm {
  Complex weight;
  double excitation_detuning_thz = 0.0;
  double emission_detuning_thz = 0.0;
  double decay_rate_per_ps = 0.0;  // 1/T2
  std::size_t emitter = 0;
  Pathway pathway;
};

// Detection weight times mu^4 times the laser filter I(nu_exc) I(nu_emit) times
// the population decay exp(-T/T1), for every pathway of every emitter.
std::vector<ResponseTerm> build_response_terms(std::span<const Emitter> emitters,
                                               const SynthesisOptions& options);

// Sums all response terms on the grid. Throws EmptyEnsemble or GridTooCoarse.
// The reduction is blocked over fixed-size row and term chunks, so the result
// is bit-identical for any thread count.
TimeDomainSignal synthesize_signal(std::span<const Emitter> emitters, const TimeGrid& grid,
                                   const SynthesisOptions& options);

// Noise-free |S(0, 0)|, used to express noise relative to the signal peak.
double peak_amplitude(std::span<const Emitter> emitters, const SynthesisOptions& options);

// Noise-free S at arbitrary (tau, t) pairs, summed in term order. Long
// diagonal decays use this instead of a full grid.
std::vector<Complex> synthesize_points(std::span<const Emitter> emitters,
                                       std::span<const std::pair<double, double>> points,
                                       const SynthesisOptions& options);

// Adds complex Gaussian white noise of the given RMS, in storage order.
void add_complex_noise(std::span<Complex> values, double rms, std::uint64_t seed);

struct WaitingTimeSample {
  double waiting_time_ps = 0.0;
  Complex amplitude;
};

std::vector<WaitingTimeSample> waiting_time_scan(std::span<const Emitter> emitters,
                                                 double tau_ps, double t_ps,
                                                 std::span<const double> waiting_times_ps,
                                                 const SynthesisOptions& options);

}  // namespace mdcs
