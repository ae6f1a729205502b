#pragma once

// Decay and lineshape fitting on top of the Levenberg-Marquardt core.

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdcs/emitter_model.hpp"
#include "mdcs/least_squares.hpp"
#include "mdcs/spectral_transform.hpp"

namespace mdcs {

enum class LineModel { Exponential, BiExponential, Gaussian, Lorentzian, BiLorentzian, FiniteBandwidth };

const char* to_string(LineModel model);

// Parameter layouts (x in ps for decays, THz for lineshapes):
//   Exponential      A, Ta            [, C]
//   BiExponential    A, Ta, B, Tb     [, C]
//   Gaussian         A, center, sigma
//   Lorentzian       A, center, gamma (half width)
//   BiLorentzian     A, center, gamma_a, B, gamma_b
//   FiniteBandwidth  A, center, sigma        (Gaussian times laser L^2)
// Decays with floor > 0 are reported as sqrt(f^2 + floor^2).
struct ModelSpec {
  LineModel model = LineModel::Exponential;
  double floor = 0.0;
  bool background = false;
  LaserSpectrum laser;  // FiniteBandwidth only

  std::size_t parameter_count() const;
  std::vector<std::string> parameter_names() const;
  std::vector<std::string> parameter_units() const;
};

void evaluate_model(const ModelSpec& spec, std::span<const double> x, const Eigen::VectorXd& p,
                    Eigen::VectorXd& y, Eigen::MatrixXd* jacobian);

struct FitParameter {
  std::string name;
  std::string unit;
  double value = 0.0;
  double uncertainty = 0.0;
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> params;
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
  bool converged = false;
  bool reportable = false;
  int iterations = 0;
  std::vector<std::string> flags;  // e.g. DegenerateFit, IllConditioned

  const FitParameter& at(const std::string& name) const;
  double value(const std::string& name) const { return at(name).value; }
  double sigma(const std::string& name) const { return at(name).uncertainty; }
  bool has_flag(const std::string& flag) const;
};

struct ExpFitOptions {
  double start_ps = 0.0;  // fit window on t + tau
  double end_ps = std::numeric_limits<double>::infinity();
  bool background = false;
  std::vector<double> weights;  // optional inverse-variance weights, one per trace point
  LsqOptions lsq;
};

// Mono- or bi-exponential decay. Bi-exponential results are ordered Ta < Tb;
// rates within 10% collapse to the mono-exponential result with the
// DegenerateFit flag. Throws FitInputError or NoConvergence.
FitResult fit_exponential(const DecayTrace& trace, int n_components, double floor = 0.0,
                          const ExpFitOptions& options = {});

enum class WidthMethod { Interpolated, Gaussian, Lorentzian };

const char* to_string(WidthMethod method);

struct WidthResult {
  double fwhm_thz = 0.0;
  double uncertainty_thz = 0.0;
  double center_thz = 0.0;
  WidthMethod method = WidthMethod::Interpolated;
};

struct AxisWindow {
  double lo_thz = -std::numeric_limits<double>::infinity();
  double hi_thz = std::numeric_limits<double>::infinity();
};

// Width of the highest valid peak inside the window. Interpolated crossings
// carry a bin/sqrt(6) uncertainty. Throws NoHalfCrossing when a half-maximum
// crossing falls outside the valid region.
WidthResult fwhm(const Trace1D& trace, WidthMethod method = WidthMethod::Interpolated,
                 const AxisWindow& window = {});

// Fits any lineshape model to the valid bins of a trace inside the window.
FitResult fit_lineshape(const Trace1D& trace, const ModelSpec& spec, const Eigen::VectorXd& p0,
                        const AxisWindow& window = {}, const LsqOptions& options = {});

// G(nu; center, sigma) L(nu)^2 on a raw (not deconvolved) projection. Adds a
// derived "fwhm" parameter and the IllConditioned flag when that width reaches
// three laser widths.
FitResult fit_finite_bandwidth(const Trace1D& trace, const LaserSpectrum& laser,
                               const AxisWindow& window = {});

// 1 / (2 pi T2) in GHz.
double lorentzian_width_from_t2(double t2_ps);

std::string to_key_value(const FitResult& fit);
std::string csv_header_row();
// One row per parameter: model, parameter, unit, value, uncertainty, residual_norm.
std::string to_csv_rows(const FitResult& fit);

}  // namespace mdcs
