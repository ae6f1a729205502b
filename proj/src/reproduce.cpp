#include "mdcs/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "mdcs/csv.hpp"
#include "mdcs/dataset.hpp"
#include "mdcs/errors.hpp"
#include "mdcs/lineshape_fit.hpp"
#include "mdcs/lockin.hpp"
#include "text_util.hpp"

namespace mdcs {

namespace {

namespace fs = std::filesystem;

// Expected line positions of the bright ensemble (THz).
constexpr double kReferenceLines[4] = {406.654, 406.713, 406.915, 406.974};

constexpr const char* kBrightConfig = R"(# Bright ensemble, PL detected.
[experiment]
seed = 7
emitters = 2000
waiting_time = 0.5 ps
detection = pl
noise = 0
temperature = 10 K
repetition_rate = 76 MHz

[laser]
wavelength = 737 nm
bandwidth = 7.5 nm

[grid]
tau_points = 512
t_points = 512
tau_step = 1.171875 ps
t_step = 1.171875 ps

[component.bright]
weight = 1
level = doublet
strain_shape = gaussian
strain_center = 0 strain
strain_fwhm = 0.028 strain
t2_rule = constant
t2 = 122 ps
yield = fixed
fixed_yield = 1
t1 = 1.7 ns

[output]
projection = rss
)";

constexpr const char* kHiddenConfig = R"(# Hidden strain-broadened ensemble, heterodyne detected.
[experiment]
seed = 11
emitters = 4000
waiting_time = 0.5 ps
detection = heterodyne
noise = 0
temperature = 10 K
repetition_rate = 76 MHz

[laser]
wavelength = 737 nm
bandwidth = 7.5 nm

[grid]
tau_points = 2048
t_points = 2048
tau_step = 0.1 ps
t_step = 0.1 ps

[component.hidden]
weight = 1
level = two_level
strain_shape = gaussian
strain_center = 0 strain
strain_fwhm = 1.84 strain
t2_rule = classes
t2_classes = 120 ps 0.7, 990 ps 0.3
yield = strain
t1 = 1.7 ns

[output]
projection = rss
deconvolution_floor = 0.2
)";

constexpr const char* kDarkStateConfig = R"(# One broad ensemble of two-level emitters with strain-dependent yield.
[experiment]
seed = 3
emitters = 4000
waiting_time = 0.5 ps
detection = heterodyne,pl
noise = 0
temperature = 10 K

[strain_model]
bright_yield = 0.8
yield_crossover = 0.014 strain
yield_steepness = 4

[laser]
wavelength = 737 nm
bandwidth = 7.5 nm

[grid]
tau_points = 2048
t_points = 2048
tau_step = 0.1 ps
t_step = 0.1 ps

[component.broad]
weight = 1
level = two_level
strain_shape = gaussian
strain_center = 0 strain
strain_fwhm = 1.84 strain
t2_rule = classes
t2_classes = 120 ps 0.7, 990 ps 0.3
yield = strain
t1 = 1.7 ns

[output]
projection = rss
)";

struct StageDef {
  std::string name;
  const char* text;
  std::vector<std::string> overrides;  // applied before the user's
};

struct TargetDef {
  std::string name;
  std::vector<StageDef> stages;
};

// Decay and scan targets see the detection noise floor; 2D width targets run
// noise-free because a white floor biases every projection mode.
const std::vector<TargetDef>& target_defs() {
  static const std::string kNoise = "experiment.noise = 0.01";
  static const std::vector<TargetDef> defs{
      {"fig1c", {{"bright", kBrightConfig, {}}}},
      {"fig1d", {{"hidden", kHiddenConfig, {}}}},
      {"fig2", {{"bright", kBrightConfig, {}}, {"hidden", kHiddenConfig, {}}}},
      {"fig3", {{"dark_state", kDarkStateConfig, {}}}},
      {"fig4", {{"bright", kBrightConfig, {kNoise}}, {"hidden", kHiddenConfig, {kNoise}}}},
      {"t1scan", {{"bright", kBrightConfig, {kNoise}}}},
  };
  return defs;
}

const TargetDef& find_target(std::string_view target) {
  for (const auto& d : target_defs())
    if (d.name == target) return d;
  throw InvalidSpec("unknown reproduction target '" + std::string(target) + "'");
}

struct Stage {
  std::string name;
  ExperimentConfig cfg;
};

class Run {
 public:
  Run(std::string target, const ReproduceOptions& o) : target_(std::move(target)), opt_(o) {}

  void log(const std::string& msg) const {
    if (opt_.log) opt_.log(target_ + ": " + msg);
  }

  std::string dir(const Stage& s) const {
    const std::string base = opt_.out_dir.empty() ? s.cfg.output_dir : opt_.out_dir;
    return (fs::path(base) / target_).string();
  }

  void text(const Stage& s, const std::string& name, const std::string& body) {
    if (!opt_.write_files) return;
    fs::create_directories(dir(s));
    const std::string path = (fs::path(dir(s)) / name).string();
    write_text_file(path, body);
    files.push_back(path);
  }

  void dataset(const Stage& s, const std::string& name, const DatasetFile& d) {
    if (!opt_.write_files) return;
    fs::create_directories(dir(s));
    const std::string path = (fs::path(dir(s)) / name).string();
    write_dataset(path, d);
    files.push_back(path);
  }

  std::vector<Emitter> emitters(const Stage& s) const {
    const auto& c = s.cfg;
    return sample_ensemble(c.ensemble, c.level_scheme, c.strain_model, c.emitters, c.seed);
  }

  SynthesisOptions synthesis(const Stage& s, std::span<const Emitter> em, Detection mode) const {
    SynthesisOptions o = synthesis_options(s.cfg, mode);
    o.threads = opt_.threads;
    if (s.cfg.noise > 0.0) o.noise_rms = s.cfg.noise * peak_amplitude(em, o);
    return o;
  }

  // Simulates, transforms and stores one detection channel.
  std::pair<TimeDomainSignal, Spectrum2D> channel(const Stage& s, std::span<const Emitter> em,
                                                  Detection mode) {
    log(s.name + ": synthesizing " + std::to_string(em.size()) + " emitters, " +
        to_string(mode) + " detection");
    auto sig = synthesize_signal(em, s.cfg.grid, synthesis(s, em, mode));
    sig.metadata["config_hash"] = hex64(config_hash(s.cfg));
    sig.metadata["seed"] = std::to_string(s.cfg.seed);
    auto spec = to_spectrum(sig, {s.cfg.pad_factor, s.cfg.cosine_window});
    const std::string stem = s.name + "_" + to_string(mode);
    dataset(s, stem + "_signal.mdcs", to_dataset(sig));
    dataset(s, stem + "_spectrum.mdcs", to_dataset(spec));
    text(s, stem + "_projection.csv", trace_to_csv(project_nu_t(spec, s.cfg.projection)));
    return {std::move(sig), std::move(spec)};
  }

  const std::string target_;
  const ReproduceOptions& opt_;
  std::vector<std::string> files;
};

// Largest |F| inside a box around (nu_tau, nu_t); returns the peak value and its nu_t.
std::pair<double, double> box_peak(const Spectrum2D& sp, double nu_tau, double nu_t, double half) {
  double best = 0.0, at = std::numeric_limits<double>::quiet_NaN();
  if (sp.nu_tau_thz.empty()) return {best, at};
  for (std::size_t i = 0; i < sp.nu_tau_thz.size(); ++i) {
    if (std::abs(sp.nu_tau_thz[i] - nu_tau) > half) continue;
    for (std::size_t j = 0; j < sp.nu_t_thz.size(); ++j) {
      if (std::abs(sp.nu_t_thz[j] - nu_t) > half) continue;
      const double a = std::abs(sp.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (a > best) {
        best = a;
        at = sp.nu_t_thz[j];
      }
    }
  }
  return {best, at};
}

Detection first_of(const ExperimentConfig& c, Detection preferred) {
  for (auto d : c.detection)
    if (d == preferred) return d;
  return c.detection.front();
}

// Line positions, cross-peak map and lock-in recovery of the bright spectrum.
void analyze_lines(Run& run, Report& rep, const Stage& s) {
  const auto em = run.emitters(s);
  const Detection mode = first_of(s.cfg, Detection::Photoluminescence);
  const auto [sig, sp] = run.channel(s, em, mode);
  const double bin = sp.t_bin_thz();
  rep.add("bright.bin", bin * 1e3, "GHz");
  rep.checks.push_back(at_most("bright.bin_width", bin * 1e3, 2.0, "GHz"));

  const LevelScheme scheme = s.cfg.level_scheme;
  const auto lines = scheme.transition_frequencies_thz();
  const auto trans = scheme.transitions();
  const double half = 0.25 * std::min(scheme.ground_splitting_ghz, scheme.excited_splitting_ghz) * 1e-3;

  // The inhomogeneous ridge is speckled at the bin level, so each line's
  // maximum is taken from a Gaussian fit to the projection around it.
  const Trace1D proj = project_nu_t(sp, s.cfg.projection);
  std::vector<double> direct(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    direct[k] = box_peak(sp, -lines[k], lines[k], half).first;
    const auto w = fwhm(proj, WidthMethod::Gaussian, {lines[k] - 2.0 * half, lines[k] + 2.0 * half});
    if (lines.size() == 4) {
      const std::string name = "bright.line" + std::to_string(k + 1);
      rep.checks.push_back(within(name, w.center_thz, kReferenceLines[k], bin, "THz", "tolerance one bin"));
    }
  }
  const double ref = *std::max_element(direct.begin(), direct.end());
  double present_min = kInfinity, absent_max = 0.0;
  std::string map;
  for (std::size_t a = 0; a < lines.size(); ++a)
    for (std::size_t b = 0; b < lines.size(); ++b) {
      if (a == b) continue;
      const double r = box_peak(sp, -lines[a], lines[b], half).first / ref;
      const bool shared = trans[a].ground == trans[b].ground;
      map += (map.empty() ? "" : " ") + std::to_string(a + 1) + std::to_string(b + 1) + ":" +
             detail::fixed(r, 3);
      if (shared)
        present_min = std::min(present_min, r);
      else
        absent_max = std::max(absent_max, r);
    }
  rep.add("bright.cross_peaks", map);
  if (lines.size() == 4) {
    // Pairs without a pathway only pick up tails of peaks 59 GHz or more away.
    rep.add("bright.cross_peak_other_max", absent_max);
    rep.checks.push_back(at_least("bright.cross_peak_shared_ground_min", present_min, 0.25, ""));
    rep.checks.push_back(
        at_least("bright.cross_peak_contrast", present_min / absent_max, 3.0, ""));
  }

  // Lock-in: the rephasing beat carries S(0, 0), every other tag combination
  // the same magnitude.
  const Complex s00 = sig.data(0, 0);
  const double scale = std::abs(s00);
  const Complex reph = s00 / scale;
  const auto beats = fourth_order_beats(reph, Complex(1.0, 0.0));
  const double fref = signature_frequency(kRephasingSignature, s.cfg.tags);
  constexpr double kRate = 2.0, kBandwidth = 2.0, kDuration = 0.02;  // MS/s, kHz, s
  const auto rec = simulate_pulse_train(beats, s.cfg.tags, kDuration, kRate,
                                        s.cfg.repetition_rate_mhz);
  const Complex got = demodulate(rec, fref, kBandwidth);
  auto others = beats;
  for (auto& b : others)
    if (b.signature == kRephasingSignature) b.amplitude = 0.0;
  const auto leak_rec = simulate_pulse_train(others, s.cfg.tags, kDuration, kRate,
                                             s.cfg.repetition_rate_mhz);
  const double leak = std::abs(demodulate(leak_rec, fref, kBandwidth));
  const double err = std::abs(got - reph) / std::abs(reph);
  const double suppression_db = -20.0 * std::log10(std::max(leak, 1e-300));
  rep.add("lockin.reference", fref, "MHz");
  rep.checks.push_back(at_most("lockin.rephasing_error", err, 0.01, ""));
  rep.checks.push_back(at_least("lockin.suppression", suppression_db, 60.0, "dB"));
}

// Per-line widths of the bright projection.
void analyze_bright_width(Run& run, Report& rep, const Stage& s) {
  const auto em = run.emitters(s);
  const Detection mode = first_of(s.cfg, Detection::Photoluminescence);
  const auto [sig, sp] = run.channel(s, em, mode);
  (void)sig;
  const Trace1D tr = project_nu_t(sp, s.cfg.projection);
  const auto lines = s.cfg.level_scheme.transition_frequencies_thz();
  const double half = 0.5 * s.cfg.level_scheme.ground_splitting_ghz * 1e-3;
  double sum = 0.0;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto w = fwhm(tr, WidthMethod::Interpolated, {lines[k] - half, lines[k] + half});
    rep.add("bright.fwhm.line" + std::to_string(k + 1), w.fwhm_thz * 1e3, "GHz");
    sum += w.fwhm_thz;
  }
  const double mean = sum / static_cast<double>(lines.size()) * 1e3;
  rep.add("bright.projection", to_string(s.cfg.projection));
  rep.checks.push_back(within("bright.fwhm", mean, 28.0, 2.8, "GHz", "mean over lines"));
}

struct HiddenWidths {
  double deconv = 0, deconv_sigma = 0, fb = 0, fb_sigma = 0, center = 0, laser_fwhm = 0;
};

HiddenWidths hidden_widths(Run& run, Report& rep, const Stage& s) {
  const auto em = run.emitters(s);
  const Detection mode = first_of(s.cfg, Detection::Heterodyne);
  const auto [sig, sp] = run.channel(s, em, mode);
  (void)sig;
  const Trace1D tr = project_nu_t(sp, s.cfg.projection);
  const Trace1D dec = deconvolve_laser(tr, s.cfg.laser, s.cfg.deconvolution_floor);
  run.text(s, s.name + "_" + to_string(mode) + "_deconvolved.csv", trace_to_csv(dec));
  const WidthResult wd = fwhm(dec, WidthMethod::Gaussian);
  const FitResult fb = fit_finite_bandwidth(tr, s.cfg.laser);
  run.text(s, s.name + "_finite_bandwidth_fit.txt", to_key_value(fb));
  HiddenWidths h{wd.fwhm_thz, wd.uncertainty_thz, fb.value("fwhm"), fb.sigma("fwhm"),
                 fb.value("center"), s.cfg.laser.fwhm_thz};
  rep.add("hidden.projection", to_string(s.cfg.projection));
  rep.add("hidden.deconvolution_floor", s.cfg.deconvolution_floor);
  rep.add("hidden.fwhm_deconvolved", h.deconv, "THz");
  rep.add("hidden.fwhm_deconvolved.sigma", h.deconv_sigma, "THz");
  rep.add("hidden.fwhm_finite_bandwidth", h.fb, "THz");
  rep.add("hidden.fwhm_finite_bandwidth.sigma", h.fb_sigma, "THz");
  rep.add("hidden.center", h.center, "THz");
  return h;
}

std::vector<std::pair<double, double>> diagonal_points(std::size_t n, double step) {
  std::vector<std::pair<double, double>> p(n);
  for (std::size_t k = 0; k < n; ++k) p[k] = {static_cast<double>(k) * step, static_cast<double>(k) * step};
  return p;
}

// |S| on the tau = t diagonal, normalized to the noise-free S(0, 0), with the
// stage's relative noise added. Returns the trace and the relative noise RMS.
std::pair<DecayTrace, double> noisy_diagonal(Run& run, const Stage& s, Detection mode,
                                             std::size_t n, double step) {
  const auto em = run.emitters(s);
  const SynthesisOptions o = run.synthesis(s, em, mode);
  const auto pts = diagonal_points(n, step);
  auto v = synthesize_points(em, pts, o);
  const double peak = std::abs(v.front());
  add_complex_noise(v, o.noise_rms, o.noise_seed);
  DecayTrace tr;
  for (std::size_t k = 0; k < n; ++k) {
    tr.delay_ps.push_back(2.0 * pts[k].first);
    tr.amplitude.push_back(std::abs(v[k]) / peak);
  }
  run.text(s, s.name + "_" + to_string(mode) + "_diagonal.csv", decay_to_csv(tr));
  return {tr, s.cfg.noise};
}

void target_fig1c(Run& run, Report& rep, std::vector<Stage>& st) { analyze_lines(run, rep, st[0]); }

void target_fig1d(Run& run, Report& rep, std::vector<Stage>& st) {
  const HiddenWidths h = hidden_widths(run, rep, st[0]);
  const double zpl = st[0].cfg.level_scheme.center_thz;
  rep.checks.push_back(within("hidden.center", h.center, zpl, 0.05, "THz", "peaked at the ZPL"));
  rep.checks.push_back(at_least("hidden.offset_from_gr1", std::abs(h.center - 404.5), 1.0, "THz"));
  rep.checks.push_back(at_most("hidden.fwhm_vs_laser", h.fb / h.laser_fwhm, 1.0, ""));
}

void target_fig2(Run& run, Report& rep, std::vector<Stage>& st) {
  analyze_bright_width(run, rep, st[0]);
  const HiddenWidths h = hidden_widths(run, rep, st[1]);
  rep.checks.push_back(within("hidden.fwhm_deconvolved", h.deconv, 1.84, 0.092, "THz"));
  rep.checks.push_back(within("hidden.fwhm_finite_bandwidth", h.fb, 1.84, 0.092, "THz"));
  const double k = 2.0 * std::hypot(h.deconv_sigma, h.fb_sigma);
  rep.checks.push_back(within("hidden.route_agreement", h.deconv - h.fb, 0.0, k, "THz",
                              "two combined standard uncertainties"));
}

// Energy fraction of a power projection outside +-band around center.
double outside_fraction(const Trace1D& power, double center, double band) {
  double out = 0.0, all = 0.0;
  for (std::size_t i = 0; i < power.size(); ++i) {
    all += power.amplitude[i];
    if (std::abs(power.nu_thz[i] - center) > band) out += power.amplitude[i];
  }
  return all > 0.0 ? out / all : 0.0;
}

void target_fig3(Run& run, Report& rep, std::vector<Stage>& st) {
  Stage& s = st[0];
  const auto em = run.emitters(s);
  const auto [sh, het] = run.channel(s, em, Detection::Heterodyne);
  const auto [sp, pl] = run.channel(s, em, Detection::Photoluminescence);
  (void)sh;
  (void)sp;

  const double center = s.cfg.level_scheme.center_thz;
  // Narrow band: three times the FWHM of the half-yield strain window.
  const double band = 3.0 * 2.0 * s.cfg.strain_model.yield_crossover * s.cfg.strain_model.shift_thz_per_unit;
  const double f_het = outside_fraction(project_nu_t(het, ProjectionMode::Power), center, band);
  const double f_pl = outside_fraction(project_nu_t(pl, ProjectionMode::Power), center, band);
  rep.add("dark_state.band", band, "THz");
  rep.add("dark_state.broad_fraction_het", f_het);
  rep.add("dark_state.broad_fraction_pl", f_pl);
  rep.checks.push_back(at_most("dark_state.broad_fraction_ratio", f_pl / f_het, 0.1, ""));

  const auto w_het = fwhm(project_nu_t(het, s.cfg.projection), WidthMethod::Gaussian);
  const auto w_pl = fwhm(project_nu_t(pl, s.cfg.projection), WidthMethod::Gaussian);
  rep.add("dark_state.fwhm_het", w_het.fwhm_thz, "THz");
  rep.add("dark_state.fwhm_pl", w_pl.fwhm_thz * 1e3, "GHz");
  rep.checks.push_back(at_least("dark_state.width_ratio", w_het.fwhm_thz / w_pl.fwhm_thz, 20.0, ""));

  // Without yield suppression PL and heterodyne differ only by a constant.
  Stage flat = s;
  flat.name = "flat_yield";
  flat.cfg.noise = 0.0;
  for (auto& c : flat.cfg.ensemble.components) {
    c.yield_rule = YieldRule::Fixed;
    c.fixed_yield = s.cfg.strain_model.bright_yield;
  }
  const auto em_flat = run.emitters(flat);
  const auto o_het = run.synthesis(flat, em_flat, Detection::Heterodyne);
  const auto o_pl = run.synthesis(flat, em_flat, Detection::Photoluminescence);
  const auto a = to_spectrum(synthesize_signal(em_flat, flat.cfg.grid, o_het));
  const auto b = to_spectrum(synthesize_signal(em_flat, flat.cfg.grid, o_pl));
  const double amax = a.data.cwiseAbs().maxCoeff();
  const Complex k = b.data(0, 0) / a.data(0, 0);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < a.data.rows(); ++i)
    for (Eigen::Index j = 0; j < a.data.cols(); ++j)
      dev = std::max(dev, std::abs(b.data(i, j) - k * a.data(i, j)));
  dev /= std::abs(k) * amax;
  rep.checks.push_back(at_most("dark_state.flat_yield_proportionality", dev, 1e-6, ""));
}

void target_fig4(Run& run, Report& rep, std::vector<Stage>& st) {
  const Stage& b = st[0];
  const auto [pl, pl_noise] = noisy_diagonal(run, b, first_of(b.cfg, Detection::Photoluminescence),
                                             b.cfg.grid.n_tau, b.cfg.grid.tau_step_ps);
  const FitResult mono = fit_exponential(pl, 1, pl_noise);
  run.text(b, "bright_exp1_fit.txt", to_key_value(mono));

  // The hidden diagonal needs nanosecond delays, far beyond the 2D grid.
  const Stage& h = st[1];
  constexpr std::size_t kPoints = 301;
  constexpr double kStep = 5.0;  // ps along tau, i.e. 10 ps in t + tau
  const auto [het, het_noise] =
      noisy_diagonal(run, h, first_of(h.cfg, Detection::Heterodyne), kPoints, kStep);
  const FitResult bi = fit_exponential(het, 2, het_noise);
  run.text(h, "hidden_exp2_fit.txt", to_key_value(bi));
  run.text(h, "fits.csv", csv_header_row() + to_csv_rows(mono) + to_csv_rows(bi));

  rep.add("bright.T2a.sigma", mono.sigma("T2a"), "ps");
  rep.add("hidden.T2a.sigma", bi.sigma("T2a"), "ps");
  rep.add("hidden.flags", bi.flags.empty() ? std::string("none") : bi.flags.front());
  rep.checks.push_back(within("bright.T2a", mono.value("T2a"), 122.0, 7.0, "ps"));
  rep.checks.push_back(within("hidden.T2a", bi.value("T2a"), 120.0, 5.0, "ps"));
  const double t2b = bi.has_flag("DegenerateFit") ? kInfinity : bi.value("T2b");
  if (std::isfinite(t2b)) rep.add("hidden.T2b.sigma", bi.sigma("T2b"), "ps");
  rep.checks.push_back(within("hidden.T2b", t2b, 990.0, 180.0, "ps"));
  rep.checks.push_back(within("hidden.linewidth_a", lorentzian_width_from_t2(bi.value("T2a")), 1.33,
                              0.06, "GHz"));
  rep.checks.push_back(within("hidden.linewidth_b",
                              std::isfinite(t2b) ? lorentzian_width_from_t2(t2b) * 1e3 : 0.0, 160.0,
                              30.0, "MHz"));
}

void target_t1scan(Run& run, Report& rep, std::vector<Stage>& st) {
  const Stage& s = st[0];
  const auto em = run.emitters(s);
  const Detection mode = first_of(s.cfg, Detection::Photoluminescence);
  SynthesisOptions o = run.synthesis(s, em, mode);
  std::vector<double> waits;
  for (int k = 0; k <= 60; ++k) waits.push_back(100.0 * k);
  constexpr double kProbe = 10.0;  // ps, on the echo diagonal
  const auto scan = waiting_time_scan(em, kProbe, kProbe, waits, o);
  std::vector<Complex> v;
  for (const auto& p : scan) v.push_back(p.amplitude);
  const double peak = std::abs(v.front());
  add_complex_noise(v, o.noise_rms, o.noise_seed);
  DecayTrace tr;
  for (std::size_t k = 0; k < v.size(); ++k) {
    tr.delay_ps.push_back(waits[k]);
    tr.amplitude.push_back(std::abs(v[k]) / peak);
  }
  CsvTable table{{"waiting_time [ps]", "amplitude [arb]"}, {}};
  for (std::size_t k = 0; k < tr.size(); ++k)
    table.rows.push_back({detail::exact(tr.delay_ps[k]), detail::exact(tr.amplitude[k])});
  run.text(s, "waiting_time_scan.csv", format_csv(table));
  const FitResult fit = fit_exponential(tr, 1, s.cfg.noise);
  run.text(s, "t1_fit.txt", to_key_value(fit));
  const double t1 = fit.value("T2a") * 1e-3;
  rep.add("T1.sigma", fit.sigma("T2a") * 1e-3, "ns");
  double input = 0.0;
  for (const auto& c : s.cfg.ensemble.components) input += c.weight * c.t1_ns;
  rep.checks.push_back(within("T1", t1, input, 0.05 * input, "ns", "5% of the input lifetime"));
  rep.checks.push_back(within("T1.bracket", t1, 1.5, 0.5, "ns", "1-2 ns bracket"));
}

}  // namespace

const std::vector<std::string>& reproduction_targets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& d : target_defs()) n.push_back(d.name);
    return n;
  }();
  return names;
}

bool is_reproduction_target(std::string_view target) {
  const auto& t = reproduction_targets();
  return std::find(t.begin(), t.end(), target) != t.end();
}

std::vector<std::string> reproduction_stages(std::string_view target) {
  std::vector<std::string> out;
  for (const auto& st : find_target(target).stages) out.push_back(st.name);
  return out;
}

std::string default_config_text(std::string_view target, std::string_view stage) {
  for (const auto& st : find_target(target).stages)
    if (st.name == stage) {
      std::string text = st.text;
      for (const auto& o : st.overrides) text += "# reproduce applies: " + o + "\n";
      return text;
    }
  throw InvalidSpec("target '" + std::string(target) + "' has no stage '" + std::string(stage) + "'");
}

Reproduction run_reproduction(std::string_view target, const ReproduceOptions& options) {
  const TargetDef& def = find_target(target);
  std::vector<Stage> stages;
  for (const auto& st : def.stages) {
    Stage s{st.name, options.base ? *options.base : parse_config(st.text)};
    if (!options.base)
      for (const auto& o : st.overrides) apply_override(s.cfg, o);
    for (const auto& o : options.overrides) apply_override(s.cfg, o);
    if (options.has_seed) s.cfg.seed = options.seed;
    stages.push_back(std::move(s));
  }

  Run run(def.name, options);
  Reproduction out;
  Report& rep = out.report;
  rep.target = def.name;
  rep.seed = stages.front().cfg.seed;
  std::string all;
  for (const auto& s : stages) all += serialize_config(s.cfg);
  rep.config_hash = fnv1a64(all);
  for (const auto& s : stages) {
    rep.add(s.name + ".config_hash", hex64(config_hash(s.cfg)));
    run.text(s, s.name + "_config.txt", serialize_config(s.cfg));
  }

  static const std::map<std::string, void (*)(Run&, Report&, std::vector<Stage>&)> handlers{
      {"fig1c", target_fig1c}, {"fig1d", target_fig1d}, {"fig2", target_fig2},
      {"fig3", target_fig3},   {"fig4", target_fig4},   {"t1scan", target_t1scan},
  };
  handlers.at(def.name)(run, rep, stages);

  run.text(stages.front(), "report.txt", rep.render());
  out.files = std::move(run.files);
  return out;
}

}  // namespace mdcs
