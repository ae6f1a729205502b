#include "mdcs/spectral_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mdcs/errors.hpp"

namespace mdcs {

namespace {

// FFT index of each output slot, ordered by ascending frequency.
std::vector<std::size_t> ascending_order(std::size_t n) {
  std::vector<std::size_t> k(n);
  const std::size_t half = n / 2;
  for (std::size_t m = 0; m < n; ++m) k[m] = (m + n - half) % n;
  return k;
}

double fft_frequency(std::size_t k, std::size_t n, double step_ps) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return (k < (n + 1) / 2 ? kk : kk - nn) / (nn * step_ps);
}

double half_cosine(std::size_t i, std::size_t n) {
  if (n < 2) return 1.0;
  return std::cos(0.5 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
}

}  // namespace

double Spectrum2D::tau_bin_thz() const {
  return nu_tau_thz.size() > 1 ? nu_tau_thz[1] - nu_tau_thz[0] : 0.0;
}

double Spectrum2D::t_bin_thz() const {
  return nu_t_thz.size() > 1 ? nu_t_thz[1] - nu_t_thz[0] : 0.0;
}

Spectrum2D to_spectrum(const TimeDomainSignal& signal, const SpectrumOptions& options) {
  if (options.pad_factor < 1) throw InvalidSpec("spectrum: pad factor must be at least 1");
  const auto nr = static_cast<std::size_t>(signal.data.rows());
  const auto nc = static_cast<std::size_t>(signal.data.cols());
  if (nr == 0 || nc == 0) throw InvalidSpec("spectrum: empty signal");
  const std::size_t pr = nr * static_cast<std::size_t>(options.pad_factor);
  const std::size_t pc = nc * static_cast<std::size_t>(options.pad_factor);

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * pr * pc));
  if (!buf) throw std::bad_alloc();
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(pr), static_cast<int>(pc), buf, buf,
                                    FFTW_FORWARD, FFTW_ESTIMATE);
  std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * pr * pc, 0.0);
  for (std::size_t i = 0; i < nr; ++i) {
    const double wi = options.cosine_window ? half_cosine(i, nr) : 1.0;
    for (std::size_t j = 0; j < nc; ++j) {
      const double w = options.cosine_window ? wi * half_cosine(j, nc) : 1.0;
      const Complex v = signal.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * w;
      buf[i * pc + j][0] = v.real();
      buf[i * pc + j][1] = v.imag();
    }
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  // nu_tau = -(frame + f_tau) and nu_t = frame - f_t: both ascending axes walk
  // the FFT frequency downwards.
  auto kr = ascending_order(pr);
  auto kc = ascending_order(pc);
  std::reverse(kr.begin(), kr.end());
  std::reverse(kc.begin(), kc.end());

  Spectrum2D out;
  out.pad_factor = options.pad_factor;
  out.frame_thz = signal.frame_thz;
  out.metadata = signal.metadata;
  out.metadata["pad_factor"] = std::to_string(options.pad_factor);
  out.metadata["window"] = options.cosine_window ? "cosine" : "none";
  out.nu_tau_thz.resize(pr);
  out.nu_t_thz.resize(pc);
  for (std::size_t m = 0; m < pr; ++m)
    out.nu_tau_thz[m] = -(signal.frame_thz + fft_frequency(kr[m], pr, signal.grid.tau_step_ps));
  for (std::size_t m = 0; m < pc; ++m)
    out.nu_t_thz[m] = signal.frame_thz - fft_frequency(kc[m], pc, signal.grid.t_step_ps);

  out.data.resize(static_cast<Eigen::Index>(pr), static_cast<Eigen::Index>(pc));
  for (std::size_t m = 0; m < pr; ++m)
    for (std::size_t l = 0; l < pc; ++l) {
      const auto& z = buf[kr[m] * pc + kc[l]];
      out.data(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = Complex(z[0], z[1]);
    }
  fftw_free(buf);
  return out;
}

const char* to_string(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::AbsSum:
      return "abs";
    case ProjectionMode::RootSumSquare:
      return "rss";
    case ProjectionMode::Power:
      return "power";
  }
  return "abs";
}

ProjectionMode projection_mode_from_string(const std::string& s) {
  if (s == "abs") return ProjectionMode::AbsSum;
  if (s == "rss") return ProjectionMode::RootSumSquare;
  if (s == "power") return ProjectionMode::Power;
  throw InvalidSpec("unknown projection mode '" + s + "' (expected abs, rss or power)");
}

Trace1D project_nu_t(const Spectrum2D& spectrum, ProjectionMode mode) {
  Trace1D out;
  out.kind = TraceKind::Projection;
  out.nu_thz = spectrum.nu_t_thz;
  out.amplitude.assign(out.nu_thz.size(), 0.0);
  out.valid.assign(out.nu_thz.size(), 1);
  for (Eigen::Index i = 0; i < spectrum.data.rows(); ++i)
    for (Eigen::Index j = 0; j < spectrum.data.cols(); ++j) {
      const Complex z = spectrum.data(i, j);
      out.amplitude[static_cast<std::size_t>(j)] +=
          mode == ProjectionMode::AbsSum ? std::abs(z) : std::norm(z);
    }
  if (mode == ProjectionMode::RootSumSquare)
    for (auto& a : out.amplitude) a = std::sqrt(a);
  return out;
}

DecayTrace diagonal_lineout(const TimeDomainSignal& signal) {
  if (!signal.grid.is_square())
    throw NonSquareGrid("diagonal lineout needs equal tau and t grids");
  DecayTrace out;
  const std::size_t n = signal.grid.n_tau;
  out.delay_ps.resize(n);
  out.amplitude.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.delay_ps[k] = 2.0 * signal.grid.tau(k);
    out.amplitude[k] =
        std::abs(signal.data(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
  }
  return out;
}

Trace1D deconvolve_laser(const Trace1D& trace, const LaserSpectrum& laser, double floor) {
  if (!(floor > 0.0 && floor < 1.0)) throw InvalidSpec("deconvolve: floor must lie in (0, 1)");
  laser.validate();
  const double peak = laser.peak_intensity();
  Trace1D out = trace;
  out.kind = TraceKind::Deconvolved;
  if (out.valid.size() != out.size()) out.valid.assign(out.size(), 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double l = laser.intensity(trace.nu_thz[i]) / peak;
    const double l2 = l * l;
    if (l2 < floor) out.valid[i] = 0;
    out.amplitude[i] = trace.amplitude[i] / std::max(l2, floor);
  }
  return out;
}

std::size_t nearest_bin(std::span<const double> axis, double value) {
  if (axis.empty()) throw InvalidSpec("nearest_bin: empty axis");
  const auto it = std::lower_bound(axis.begin(), axis.end(), value);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  const auto hi = static_cast<std::size_t>(it - axis.begin());
  return (value - axis[hi - 1] <= axis[hi] - value) ? hi - 1 : hi;
}

}  // namespace mdcs
