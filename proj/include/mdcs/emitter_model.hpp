#pragma once

// Level scheme, strain response and inhomogeneous ensembles of SiV- centers.
//
// Units used throughout the library: optical frequencies in THz, fine-structure
// splittings in GHz, coherence times in ps, population lifetimes in ns. Since
// THz * ps = 1, phases are simply 2*pi*nu*t with nu in THz and t in ps.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mdcs {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kGaussianFwhmPerSigma = 2.3548200450309493;  // 2*sqrt(2 ln 2)
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// One optical transition between a ground and an excited sublevel.
struct Transition {
  int ground = 0;   // 0 = lower ground sublevel
  int excited = 0;  // 0 = lower excited sublevel
  double frequency_thz = 0.0;

  bool operator==(const Transition&) const = default;
};

// Spin-orbit split ground and excited doublets, or a single two-level transition.
//
// Doublet transitions are ordered by increasing frequency:
//   0: e_lower -> g_upper   nu0 - (De + Dg)/2
//   1: e_lower -> g_lower   nu0 - (De - Dg)/2
//   2: e_upper -> g_upper   nu0 + (De - Dg)/2
//   3: e_upper -> g_lower   nu0 + (De + Dg)/2
struct LevelScheme {
  double center_thz = 406.814;
  double ground_splitting_ghz = 59.0;
  double excited_splitting_ghz = 261.0;
  bool two_level = false;

  static LevelScheme siv_default() { return {}; }
  static LevelScheme two_level_at(double center_thz) {
    return {center_thz, 0.0, 0.0, true};
  }

  std::size_t transition_count() const { return two_level ? 1 : 4; }
  std::vector<Transition> transitions() const;
  std::vector<double> transition_frequencies_thz() const;

  // Throws InvalidSpec (or SplittingCollapse for non-positive splittings).
  void validate() const;

  bool operator==(const LevelScheme&) const = default;
};

// Least-squares inverse of LevelScheme::transition_frequencies_thz for a
// doublet: recovers (nu0, Dg, De) from four ascending line positions.
LevelScheme solve_level_scheme(std::span<const double, 4> lines_thz);

// Scalar strain model. The optical center shifts linearly with strain; the
// splittings grow with |strain|; the radiative quantum yield falls off as an
// algebraic sigmoid Y0 / (1 + (|s|/s_c)^p).
struct StrainModel {
  double shift_thz_per_unit = 1.0;
  double ground_splitting_ghz_per_unit = 50.0;
  double excited_splitting_ghz_per_unit = 100.0;
  double bright_yield = 1.0;        // Y0
  double yield_crossover = 2.0e-4;  // s_c, strain units
  double yield_steepness = 4.0;     // p

  void validate() const;
  bool operator==(const StrainModel&) const = default;
};

LevelScheme strained_level_scheme(const LevelScheme& base, const StrainModel& model,
                                  double strain);
double quantum_yield(const StrainModel& model, double strain);

struct Emitter {
  double strain = 0.0;
  LevelScheme scheme;
  double dipole = 1.0;
  double t1_ns = 1.7;
  double t2_ps = 122.0;
  double quantum_yield = 1.0;
  int component = 0;

  // Throws InvalidSpec when T2 > 2*T1, dipole <= 0 or the yield leaves (0, 1].
  void validate() const;
  bool operator==(const Emitter&) const = default;
};

enum class StrainShape { Delta, Gaussian, Lorentzian };

struct StrainDistribution {
  StrainShape shape = StrainShape::Gaussian;
  double center = 0.0;
  double fwhm = 0.0;

  bool operator==(const StrainDistribution&) const = default;
};

enum class DephasingRule { Constant, Classes, LogNormal };

struct DephasingClass {
  double t2_ps = 0.0;
  double weight = 0.0;

  bool operator==(const DephasingClass&) const = default;
};

struct DephasingSpec {
  DephasingRule rule = DephasingRule::Constant;
  double t2_ps = 122.0;                 // Constant
  std::vector<DephasingClass> classes;  // Classes
  double lognormal_median_ps = 300.0;   // LogNormal
  double lognormal_sigma = 0.5;         // LogNormal, std-dev of ln(T2)

  static DephasingSpec constant(double t2_ps) {
    DephasingSpec d;
    d.t2_ps = t2_ps;
    return d;
  }
  static DephasingSpec from_classes(std::vector<DephasingClass> classes) {
    DephasingSpec d;
    d.rule = DephasingRule::Classes;
    d.classes = std::move(classes);
    return d;
  }

  bool operator==(const DephasingSpec&) const = default;
};

enum class YieldRule { Strain, Fixed };

struct PopulationComponent {
  std::string name;
  double weight = 1.0;
  StrainDistribution strain;
  DephasingSpec dephasing;
  YieldRule yield_rule = YieldRule::Strain;
  double fixed_yield = 1.0;
  double dipole = 1.0;
  double t1_ns = 1.7;
  // Collapse the fine structure to a single line at the base center frequency.
  bool two_level = false;

  bool operator==(const PopulationComponent&) const = default;
};

struct EnsembleSpec {
  std::vector<PopulationComponent> components;

  // Throws InvalidSpec on weights not summing to one, non-positive FWHM for a
  // non-delta shape, empty class lists and similar.
  void validate() const;
  bool operator==(const EnsembleSpec&) const = default;
};

// Draws n emitters. Component membership is a categorical draw per emitter;
// within a component the strain values use jittered stratified inverse-CDF
// sampling so that the ensemble fills its distribution evenly. The result is a
// pure function of (spec, base, model, n, seed).
std::vector<Emitter> sample_ensemble(const EnsembleSpec& spec, const LevelScheme& base,
                                     const StrainModel& model, std::size_t n,
                                     std::uint64_t seed);

enum class LaserShape { Gaussian, Flat, Tabulated };

// Laser power spectrum normalized to unit peak. Each light-matter interaction
// carries the field amplitude sqrt(intensity), so a degenerate four-wave-mixing
// term is weighted by intensity(nu_exc) * intensity(nu_emit).
struct LaserSpectrum {
  double center_thz = 406.774;
  double fwhm_thz = 4.14;
  LaserShape shape = LaserShape::Gaussian;
  std::vector<double> table_thz;    // Tabulated: strictly increasing abscissa
  std::vector<double> table_value;  // Tabulated: strictly positive values

  static LaserSpectrum gaussian(double center_thz, double fwhm_thz);
  static LaserSpectrum flat(double center_thz);
  // Gaussian with center c/lambda and width c*dlambda/lambda^2.
  static LaserSpectrum from_wavelength(double center_nm, double bandwidth_nm);
  static LaserSpectrum tabulated(std::vector<double> nu_thz, std::vector<double> value);

  double intensity(double nu_thz) const;
  double field(double nu_thz) const;
  double peak_intensity() const;
  void validate() const;

  bool operator==(const LaserSpectrum&) const = default;
};

// Standard normal quantile (Acklam's rational approximation polished with one
// Halley step against erfc); used by the stratified sampler.
double normal_quantile(double p);

}  // namespace mdcs
