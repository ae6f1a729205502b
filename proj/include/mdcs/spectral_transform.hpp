#pragma once

// 2D rephasing spectra and the 1D objects derived from them.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdcs/emitter_model.hpp"
#include "mdcs/response_synth.hpp"

namespace mdcs {

// Rows run over nu_tau, columns over nu_t; both axes are absolute (THz) and
// ascending. nu_tau is negative for optical signals because the first
// interaction is conjugate.
struct Spectrum2D {
  ComplexMatrix data;
  std::vector<double> nu_tau_thz;
  std::vector<double> nu_t_thz;
  int pad_factor = 1;
  double frame_thz = 0.0;
  std::map<std::string, std::string> metadata;

  double tau_bin_thz() const;
  double t_bin_thz() const;
};

struct SpectrumOptions {
  int pad_factor = 1;
  // Half-cosine taper from 1 at zero delay to 0 at the last sample. Display only.
  bool cosine_window = false;
};

// Unnormalized 2D DFT with kernel exp(-i 2 pi f tau) exp(-i 2 pi f t) over the
// zero-padded grid: sum |F|^2 = (P_tau P_t) sum |S|^2 with P the padded sizes.
Spectrum2D to_spectrum(const TimeDomainSignal& signal, const SpectrumOptions& options = {});

enum class ProjectionMode { AbsSum, RootSumSquare, Power };

const char* to_string(ProjectionMode mode);
ProjectionMode projection_mode_from_string(const std::string& s);

enum class TraceKind { Projection, Deconvolved, Model };

struct Trace1D {
  std::vector<double> nu_thz;
  std::vector<double> amplitude;
  std::vector<std::uint8_t> valid;  // 1 where usable downstream
  TraceKind kind = TraceKind::Projection;

  std::size_t size() const { return nu_thz.size(); }
};

// Per-column reduction over nu_tau: sum |F| (the default), sqrt(sum |F|^2), or sum |F|^2.
Trace1D project_nu_t(const Spectrum2D& spectrum, ProjectionMode mode = ProjectionMode::AbsSum);

struct DecayTrace {
  std::vector<double> delay_ps;  // t + tau
  std::vector<double> amplitude;

  std::size_t size() const { return delay_ps.size(); }
};

// |S(k d, k d)| against 2 k d. Throws NonSquareGrid.
DecayTrace diagonal_lineout(const TimeDomainSignal& signal);

// trace / max(L^2, floor) with L the unit-peak laser intensity. Bins below the
// floor are flagged invalid.
Trace1D deconvolve_laser(const Trace1D& trace, const LaserSpectrum& laser, double floor = 0.05);

std::size_t nearest_bin(std::span<const double> axis, double value);

}  // namespace mdcs
