#include "mdcs/lineshape_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mdcs/errors.hpp"
#include "text_util.hpp"

namespace mdcs {

namespace {

struct Window1D {
  std::vector<double> x, y, w;
};

// Ordinary least-squares line through (x, log y) for positive y.
std::pair<double, double> log_linear(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    ++n;
  }
  if (n < 2) return {0.0, 0.0};
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return {0.0, sy / n};
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

double time_from_slope(double slope, double span) {
  // A non-negative slope means no visible decay in the segment; fall back to a
  // time long compared with the segment.
  return slope < 0.0 ? -1.0 / slope : 10.0 * std::max(span, 1.0);
}

FitResult pack(const ModelSpec& spec, const LsqResult& lsq) {
  FitResult out;
  out.model = to_string(spec.model);
  const auto names = spec.parameter_names();
  const auto units = spec.parameter_units();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out.params.push_back(
        {names[k], units[k], lsq.params[i], std::sqrt(std::max(0.0, lsq.covariance(i, i)))});
  }
  out.residual_norm = lsq.residual_norm;
  out.initial_residual_norm = lsq.initial_residual_norm;
  out.converged = lsq.converged;
  out.reportable = lsq.converged;
  out.iterations = lsq.iterations;
  return out;
}

LsqResult run_fit(const ModelSpec& spec, const Window1D& d, const Eigen::VectorXd& p0,
                  const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const LsqOptions& options) {
  const auto m = static_cast<Eigen::Index>(d.x.size());
  Eigen::VectorXd sw(m);
  for (Eigen::Index i = 0; i < m; ++i)
    sw[i] = d.w.empty() ? 1.0 : std::sqrt(d.w[static_cast<std::size_t>(i)]);
  Eigen::VectorXd y(m);
  auto f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    evaluate_model(spec, d.x, p, y, J);
    for (Eigen::Index i = 0; i < m; ++i) r[i] = sw[i] * (y[i] - d.y[static_cast<std::size_t>(i)]);
    if (J) *J = sw.asDiagonal() * (*J);
  };
  auto res = levenberg_marquardt(f, p0, lo, hi, d.x.size(), options);
  if (!res.converged)
    throw NoConvergence(std::string("fit: ") + to_string(spec.model) + " did not converge in " +
                        std::to_string(res.iterations) + " iterations");
  return res;
}

Window1D select_trace(const Trace1D& trace, const AxisWindow& window) {
  Window1D d;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const bool ok = trace.valid.size() != trace.size() || trace.valid[i];
    if (!ok || trace.nu_thz[i] < window.lo_thz || trace.nu_thz[i] > window.hi_thz) continue;
    d.x.push_back(trace.nu_thz[i]);
    d.y.push_back(trace.amplitude[i]);
  }
  return d;
}

bool in_region(const Trace1D& trace, const AxisWindow& window, std::size_t i) {
  const bool ok = trace.valid.size() != trace.size() || trace.valid[i];
  return ok && trace.nu_thz[i] >= window.lo_thz && trace.nu_thz[i] <= window.hi_thz;
}

WidthResult interpolated_width(const Trace1D& trace, const AxisWindow& window) {
  const std::size_t n = trace.size();
  std::size_t peak = n;
  for (std::size_t i = 0; i < n; ++i)
    if (in_region(trace, window, i) && (peak == n || trace.amplitude[i] > trace.amplitude[peak]))
      peak = i;
  if (peak == n) throw NoHalfCrossing("fwhm: no valid bins in the window");
  const double half = 0.5 * trace.amplitude[peak];

  std::size_t l = peak;
  while (true) {
    if (l == 0 || !in_region(trace, window, l - 1))
      throw NoHalfCrossing("fwhm: peak truncated on the low-frequency side");
    --l;
    if (trace.amplitude[l] < half) break;
  }
  std::size_t r = peak;
  while (true) {
    if (r + 1 >= n || !in_region(trace, window, r + 1))
      throw NoHalfCrossing("fwhm: peak truncated on the high-frequency side");
    ++r;
    if (trace.amplitude[r] < half) break;
  }
  auto cross = [&](std::size_t a, std::size_t b) {
    const double ya = trace.amplitude[a], yb = trace.amplitude[b];
    return trace.nu_thz[a] + (half - ya) / (yb - ya) * (trace.nu_thz[b] - trace.nu_thz[a]);
  };
  const double xl = cross(l, l + 1);
  const double xr = cross(r - 1, r);
  const double bin = trace.nu_thz[peak + 1] - trace.nu_thz[peak];
  return {xr - xl, std::abs(bin) / std::sqrt(6.0), 0.5 * (xl + xr), WidthMethod::Interpolated};
}

}  // namespace

const char* to_string(LineModel model) {
  switch (model) {
    case LineModel::Exponential:
      return "exp1";
    case LineModel::BiExponential:
      return "exp2";
    case LineModel::Gaussian:
      return "gaussian";
    case LineModel::Lorentzian:
      return "lorentzian";
    case LineModel::BiLorentzian:
      return "bilorentzian";
    case LineModel::FiniteBandwidth:
      return "finite_bandwidth";
  }
  return "?";
}

const char* to_string(WidthMethod method) {
  switch (method) {
    case WidthMethod::Interpolated:
      return "interpolated";
    case WidthMethod::Gaussian:
      return "gaussian";
    case WidthMethod::Lorentzian:
      return "lorentzian";
  }
  return "?";
}

std::size_t ModelSpec::parameter_count() const { return parameter_names().size(); }

std::vector<std::string> ModelSpec::parameter_names() const {
  std::vector<std::string> n;
  switch (model) {
    case LineModel::Exponential:
      n = {"A", "T2a"};
      break;
    case LineModel::BiExponential:
      n = {"A", "T2a", "B", "T2b"};
      break;
    case LineModel::Gaussian:
    case LineModel::FiniteBandwidth:
      n = {"A", "center", "sigma"};
      break;
    case LineModel::Lorentzian:
      n = {"A", "center", "gamma"};
      break;
    case LineModel::BiLorentzian:
      n = {"A", "center", "gamma_a", "B", "gamma_b"};
      break;
  }
  const bool decay = model == LineModel::Exponential || model == LineModel::BiExponential;
  if (decay && background) n.push_back("C");
  return n;
}

std::vector<std::string> ModelSpec::parameter_units() const {
  std::vector<std::string> u;
  for (const auto& n : parameter_names()) {
    if (n == "T2a" || n == "T2b")
      u.push_back("ps");
    else if (n == "center" || n == "sigma" || n.rfind("gamma", 0) == 0)
      u.push_back("THz");
    else
      u.push_back("arb");
  }
  return u;
}

void evaluate_model(const ModelSpec& spec, std::span<const double> x, const Eigen::VectorXd& p,
                    Eigen::VectorXd& y, Eigen::MatrixXd* jacobian) {
  const auto m = static_cast<Eigen::Index>(x.size());
  const auto np = static_cast<Eigen::Index>(spec.parameter_count());
  if (p.size() != np) throw FitInputError("model: wrong parameter count");
  y.resize(m);
  Eigen::MatrixXd scratch;
  Eigen::MatrixXd& J = jacobian ? *jacobian : scratch;
  if (jacobian) J.setZero(m, np);

  switch (spec.model) {
    case LineModel::Exponential:
    case LineModel::BiExponential: {
      const int nc = spec.model == LineModel::Exponential ? 1 : 2;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        double f = 0.0;
        for (int c = 0; c < nc; ++c) {
          const double a = p[2 * c], T = p[2 * c + 1];
          const double e = std::exp(-xi / T);
          f += a * e;
          if (jacobian) {
            J(i, 2 * c) = e;
            J(i, 2 * c + 1) = a * e * xi / (T * T);
          }
        }
        if (spec.background) {
          f += p[np - 1];
          if (jacobian) J(i, np - 1) = 1.0;
        }
        if (spec.floor > 0.0) {
          const double q = std::sqrt(f * f + spec.floor * spec.floor);
          if (jacobian) J.row(i) *= f / q;
          f = q;
        }
        y[i] = f;
      }
      break;
    }
    case LineModel::Gaussian:
    case LineModel::FiniteBandwidth: {
      const double a = p[0], c = p[1], s = p[2];
      const double peak = spec.model == LineModel::FiniteBandwidth ? spec.laser.peak_intensity() : 1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        double l2 = 1.0;
        if (spec.model == LineModel::FiniteBandwidth) {
          const double l = spec.laser.intensity(xi) / peak;
          l2 = l * l;
        }
        const double u = xi - c;
        const double g = std::exp(-0.5 * u * u / (s * s)) * l2;
        y[i] = a * g;
        if (jacobian) {
          J(i, 0) = g;
          J(i, 1) = a * g * u / (s * s);
          J(i, 2) = a * g * u * u / (s * s * s);
        }
      }
      break;
    }
    case LineModel::Lorentzian:
    case LineModel::BiLorentzian: {
      const int nc = spec.model == LineModel::Lorentzian ? 1 : 2;
      const double c = p[1];
      for (Eigen::Index i = 0; i < m; ++i) {
        const double u = x[static_cast<std::size_t>(i)] - c;
        double f = 0.0;
        for (int k = 0; k < nc; ++k) {
          const Eigen::Index ia = k == 0 ? 0 : 3, ig = k == 0 ? 2 : 4;
          const double a = p[ia], g = p[ig];
          const double d = u * u + g * g;
          f += a * g * g / d;
          if (jacobian) {
            J(i, ia) = g * g / d;
            J(i, 1) += 2.0 * a * g * g * u / (d * d);
            J(i, ig) = 2.0 * a * g * u * u / (d * d);
          }
        }
        y[i] = f;
      }
      break;
    }
  }
}

const FitParameter& FitResult::at(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw FitInputError("fit result has no parameter '" + name + "'");
}

bool FitResult::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

FitResult fit_exponential(const DecayTrace& trace, int n_components, double floor,
                          const ExpFitOptions& options) {
  if (n_components != 1 && n_components != 2)
    throw FitInputError("fit_exponential: n_components must be 1 or 2");
  if (!(floor >= 0.0)) throw FitInputError("fit_exponential: floor must be non-negative");
  if (!options.weights.empty() && options.weights.size() != trace.size())
    throw FitInputError("fit_exponential: weight count does not match the trace");

  ModelSpec spec;
  spec.model = n_components == 1 ? LineModel::Exponential : LineModel::BiExponential;
  spec.floor = floor;
  spec.background = options.background;
  const std::size_t np = spec.parameter_count();

  Window1D d;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.delay_ps[i] < options.start_ps || trace.delay_ps[i] > options.end_ps) continue;
    d.x.push_back(trace.delay_ps[i]);
    d.y.push_back(trace.amplitude[i]);
    if (!options.weights.empty()) d.w.push_back(options.weights[i]);
  }
  if (d.x.size() < 4 * np)
    throw FitInputError("fit_exponential: " + std::to_string(d.x.size()) +
                        " points for " + std::to_string(np) + " parameters (need 4x)");

  // Initial values from the floor-corrected amplitude.
  std::vector<double> ye(d.y.size());
  for (std::size_t i = 0; i < ye.size(); ++i)
    ye[i] = std::sqrt(std::max(d.y[i] * d.y[i] - floor * floor, 0.0));
  const double span = d.x.back() - d.x.front();

  Eigen::VectorXd p0(static_cast<Eigen::Index>(np));
  if (n_components == 1) {
    const double ymax = *std::max_element(ye.begin(), ye.end());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ye.size(); ++i)
      if (ye[i] > 0.1 * ymax) {
        xs.push_back(d.x[i]);
        ys.push_back(ye[i]);
      }
    if (xs.size() < 2) {
      xs = d.x;
      ys = ye;
    }
    const auto [slope, icpt] = log_linear(xs, ys);
    p0[0] = std::exp(icpt);
    p0[1] = time_from_slope(slope, span);
  } else {
    const std::size_t third = d.x.size() / 3;
    const std::span<const double> xa(d.x.data(), third), ya(ye.data(), third);
    const std::span<const double> xb(d.x.data() + d.x.size() - third, third),
        yb(ye.data() + ye.size() - third, third);
    double ta = time_from_slope(log_linear(xa, ya).first, span);
    double tb = time_from_slope(log_linear(xb, yb).first, span);
    if (ta > tb) std::swap(ta, tb);
    if (tb < 1.5 * ta) tb = 3.0 * ta;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(d.x.size()), 2);
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.x.size()));
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      M(r, 0) = std::exp(-d.x[i] / ta);
      M(r, 1) = std::exp(-d.x[i] / tb);
      v[r] = ye[i];
    }
    Eigen::VectorXd ab = M.colPivHouseholderQr().solve(v);
    const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
    p0[0] = std::max(ab[0], 1e-3 * scale);
    p0[1] = ta;
    p0[2] = std::max(ab[1], 1e-3 * scale);
    p0[3] = tb;
  }
  if (spec.background) p0[static_cast<Eigen::Index>(np) - 1] = 0.0;

  Eigen::VectorXd lo = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(np));
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(np), kInfinity);
  lo[1] = 1e-9;
  if (n_components == 2) lo[3] = 1e-9;

  const auto lsq = run_fit(spec, d, p0, lo, hi, options.lsq);
  FitResult out = pack(spec, lsq);
  if (n_components == 2) {
    if (out.params[1].value > out.params[3].value) {
      std::swap(out.params[0].value, out.params[2].value);
      std::swap(out.params[0].uncertainty, out.params[2].uncertainty);
      std::swap(out.params[1].value, out.params[3].value);
      std::swap(out.params[1].uncertainty, out.params[3].uncertainty);
    }
    if (out.params[3].value < 1.1 * out.params[1].value) {
      FitResult mono = fit_exponential(trace, 1, floor, options);
      mono.flags.push_back("DegenerateFit");
      return mono;
    }
  }
  return out;
}

FitResult fit_lineshape(const Trace1D& trace, const ModelSpec& spec, const Eigen::VectorXd& p0,
                        const AxisWindow& window, const LsqOptions& options) {
  if (spec.model == LineModel::Exponential || spec.model == LineModel::BiExponential)
    throw FitInputError("fit_lineshape: decay models belong to fit_exponential");
  const Window1D d = select_trace(trace, window);
  const std::size_t np = spec.parameter_count();
  if (d.x.size() < 4 * np)
    throw FitInputError("fit_lineshape: " + std::to_string(d.x.size()) + " usable bins for " +
                        std::to_string(np) + " parameters (need 4x)");
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(np));
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(np), kInfinity);
  lo[1] = -kInfinity;
  const auto names = spec.parameter_names();
  for (std::size_t k = 0; k < np; ++k) {
    const auto& n = names[k];
    if (n == "sigma" || n.rfind("gamma", 0) == 0) lo[static_cast<Eigen::Index>(k)] = 1e-12;
  }
  return pack(spec, run_fit(spec, d, p0, lo, hi, options));
}

WidthResult fwhm(const Trace1D& trace, WidthMethod method, const AxisWindow& window) {
  if (trace.amplitude.size() != trace.size()) throw FitInputError("fwhm: malformed trace");
  const WidthResult est = interpolated_width(trace, window);
  if (method == WidthMethod::Interpolated) return est;

  const std::size_t peak = nearest_bin(trace.nu_thz, est.center_thz);
  ModelSpec spec;
  Eigen::VectorXd p0(3);
  if (method == WidthMethod::Gaussian) {
    spec.model = LineModel::Gaussian;
    p0 << trace.amplitude[peak], est.center_thz, est.fwhm_thz / kGaussianFwhmPerSigma;
  } else {
    spec.model = LineModel::Lorentzian;
    p0 << trace.amplitude[peak], est.center_thz, 0.5 * est.fwhm_thz;
  }
  const FitResult fit = fit_lineshape(trace, spec, p0, window);
  const double k = method == WidthMethod::Gaussian ? kGaussianFwhmPerSigma : 2.0;
  return {k * fit.params[2].value, k * fit.params[2].uncertainty, fit.params[1].value, method};
}

FitResult fit_finite_bandwidth(const Trace1D& trace, const LaserSpectrum& laser,
                               const AxisWindow& window) {
  laser.validate();
  // Start from the laser-divided trace where the laser is strong.
  Trace1D div = deconvolve_laser(trace, laser, 0.2);
  double sigma0 = laser.fwhm_thz / kGaussianFwhmPerSigma;
  double center0 = laser.center_thz;
  double amp0 = 0.0;
  try {
    const WidthResult w = interpolated_width(div, window);
    sigma0 = w.fwhm_thz / kGaussianFwhmPerSigma;
    center0 = w.center_thz;
  } catch (const NoHalfCrossing&) {
  }
  for (std::size_t i = 0; i < div.size(); ++i)
    if (in_region(div, window, i)) amp0 = std::max(amp0, div.amplitude[i]);

  ModelSpec spec;
  spec.model = LineModel::FiniteBandwidth;
  spec.laser = laser;
  Eigen::VectorXd p0(3);
  p0 << amp0, center0, sigma0;
  FitResult out = fit_lineshape(trace, spec, p0, window);
  out.params.push_back({"fwhm", "THz", kGaussianFwhmPerSigma * out.params[2].value,
                        kGaussianFwhmPerSigma * out.params[2].uncertainty});
  if (out.params.back().value >= 3.0 * laser.fwhm_thz) out.flags.push_back("IllConditioned");
  return out;
}

double lorentzian_width_from_t2(double t2_ps) {
  if (!(t2_ps > 0.0)) throw FitInputError("T2 must be positive");
  return 1e3 / (2.0 * std::numbers::pi * t2_ps);
}

std::string to_key_value(const FitResult& fit) {
  std::ostringstream os;
  os << "model = " << fit.model << "\n";
  os << "converged = " << (fit.converged ? "true" : "false") << "\n";
  os << "reportable = " << (fit.reportable ? "true" : "false") << "\n";
  os << "iterations = " << fit.iterations << "\n";
  os << "residual_norm = " << detail::exact(fit.residual_norm) << "\n";
  std::string flags;
  for (const auto& f : fit.flags) flags += (flags.empty() ? "" : ",") + f;
  os << "flags = " << flags << "\n";
  for (const auto& p : fit.params) {
    os << p.name << " = " << detail::exact(p.value) << " " << p.unit << "\n";
    os << p.name << ".sigma = " << detail::exact(p.uncertainty) << " " << p.unit << "\n";
  }
  return os.str();
}

std::string csv_header_row() {
  return "model,parameter,unit,value,uncertainty,residual_norm\n";
}

std::string to_csv_rows(const FitResult& fit) {
  std::string s;
  for (const auto& p : fit.params)
    s += fit.model + "," + p.name + "," + p.unit + "," + detail::exact(p.value) + "," +
         detail::exact(p.uncertainty) + "," + detail::exact(fit.residual_norm) + "\n";
  return s;
}

}  // namespace mdcs
