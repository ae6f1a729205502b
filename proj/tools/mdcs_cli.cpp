#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdcs/config.hpp"
#include "mdcs/csv.hpp"
#include "mdcs/dataset.hpp"
#include "mdcs/errors.hpp"
#include "mdcs/lineshape_fit.hpp"
#include "mdcs/lockin.hpp"
#include "mdcs/reproduce.hpp"

namespace fs = std::filesystem;
using namespace mdcs;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kRuntime = 3 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
  bool verbose = false;
  std::vector<std::string> overrides;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig load(const Globals& g, bool required) {
  ExperimentConfig c;
  if (!g.config.empty())
    c = load_config(g.config);
  else if (required)
    throw UsageError("this command needs --config");
  for (const auto& o : g.overrides) apply_override(c, o);
  if (g.seed) c.seed = *g.seed;
  return c;
}

std::string out_path(const Globals& g, const ExperimentConfig& c, const std::string& name) {
  const std::string dir = g.out_dir.empty() ? c.output_dir : g.out_dir;
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void say(const Globals& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << "\n";
}

void print_fit(const FitResult& fit, const std::string& output) {
  const std::string kv = to_key_value(fit);
  if (!output.empty()) write_text_file(output, kv);
  std::cout << kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collinear rephasing MDCS simulator and analysis pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment configuration file");
  app.add_option("--seed", g.seed, "Override the ensemble seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Synthesis worker threads")->check(CLI::Range(1u, 1024u));
  app.add_flag("--verbose,-v", g.verbose, "Progress messages on stderr");
  app.add_option("--set", g.overrides, "Config override 'section.key = value unit' (repeatable)");

  int code = kOk;

  auto* simulate = app.add_subcommand("simulate", "Synthesize S(tau, T, t) for every detection mode");
  simulate->callback([&] {
    const auto c = load(g, true);
    const auto em = sample_ensemble(c.ensemble, c.level_scheme, c.strain_model, c.emitters, c.seed);
    for (const auto mode : c.detection) {
      SynthesisOptions o = synthesis_options(c, mode);
      o.threads = g.threads;
      if (c.noise > 0.0) o.noise_rms = c.noise * peak_amplitude(em, o);
      say(g, "synthesizing " + std::to_string(em.size()) + " emitters (" + to_string(mode) + ")");
      auto sig = synthesize_signal(em, c.grid, o);
      sig.metadata["config_hash"] = hex64(config_hash(c));
      sig.metadata["seed"] = std::to_string(c.seed);
      const auto path = out_path(g, c, std::string("signal_") + to_string(mode) + ".mdcs");
      write_dataset(path, to_dataset(sig));
      std::cout << path << "\n";
    }
  });

  std::string in, out;
  int pad = 0;
  bool window = false;
  auto* spectrum = app.add_subcommand("spectrum", "2D Fourier transform of a signal dataset");
  spectrum->add_option("input", in, "Signal dataset")->required();
  spectrum->add_option("output", out, "Spectrum dataset")->required();
  spectrum->add_option("--pad", pad, "Zero-padding factor")->check(CLI::Range(1, 16));
  spectrum->add_flag("--window", window, "Half-cosine window");
  spectrum->callback([&] {
    const auto c = load(g, false);
    SpectrumOptions o{pad > 0 ? pad : c.pad_factor, window || c.cosine_window};
    write_dataset(out, to_dataset(to_spectrum(signal_from_dataset(read_dataset(in)), o)));
  });

  std::string mode_name;
  auto* project = app.add_subcommand("project", "Project a spectrum onto the emission axis");
  project->add_option("input", in, "Spectrum dataset")->required();
  project->add_option("output", out, "Trace CSV")->required();
  project->add_option("--mode", mode_name, "abs, rss or power");
  project->callback([&] {
    const auto c = load(g, false);
    const auto m = mode_name.empty() ? c.projection : projection_mode_from_string(mode_name);
    write_text_file(out, trace_to_csv(project_nu_t(spectrum_from_dataset(read_dataset(in)), m)));
  });

  std::optional<double> floor;
  auto* deconv = app.add_subcommand("deconvolve", "Divide a projection by the squared laser spectrum");
  deconv->add_option("input", in, "Trace CSV")->required();
  deconv->add_option("output", out, "Trace CSV")->required();
  deconv->add_option("--floor", floor, "Relative L^2 floor");
  deconv->callback([&] {
    const auto c = load(g, false);
    const auto tr = trace_from_csv(read_text_file(in));
    write_text_file(out, trace_to_csv(deconvolve_laser(tr, c.laser, floor.value_or(c.deconvolution_floor))));
  });

  auto* lineout = app.add_subcommand("lineout", "Diagonal tau = t decay of a signal dataset");
  lineout->add_option("input", in, "Signal dataset")->required();
  lineout->add_option("output", out, "Decay CSV")->required();
  lineout->callback([&] {
    write_text_file(out, decay_to_csv(diagonal_lineout(signal_from_dataset(read_dataset(in)))));
  });

  int components = 1;
  double start = 0.0, end = kInfinity, fit_floor = 0.0;
  bool background = false;
  auto* fit_decay = app.add_subcommand("fit-decay", "Mono- or bi-exponential fit of a decay CSV");
  fit_decay->add_option("input", in, "Decay CSV")->required();
  fit_decay->add_option("--components", components, "1 or 2")->check(CLI::IsMember({1, 2}));
  fit_decay->add_option("--floor", fit_floor, "Noise floor in trace units");
  fit_decay->add_option("--start", start, "Window start (ps)");
  fit_decay->add_option("--end", end, "Window end (ps)");
  fit_decay->add_flag("--background", background, "Additive constant");
  fit_decay->add_option("--output", out, "Write the fit as key = value text");
  fit_decay->callback([&] {
    ExpFitOptions o;
    o.start_ps = start;
    o.end_ps = end;
    o.background = background;
    const auto fit = fit_exponential(decay_from_csv(read_text_file(in)), components, fit_floor, o);
    print_fit(fit, out);
    for (const auto& p : fit.params)
      if (p.name == "T2a" || p.name == "T2b")
        std::cout << p.name << ".linewidth = " << lorentzian_width_from_t2(p.value) << " GHz\n";
  });

  std::string method = "interpolated";
  double lo = -kInfinity, hi = kInfinity;
  auto* fit_width = app.add_subcommand("fit-width", "FWHM of a trace CSV");
  fit_width->add_option("input", in, "Trace CSV")->required();
  fit_width->add_option("--method", method, "interpolated, gaussian, lorentzian or finite-bandwidth")
      ->check(CLI::IsMember({"interpolated", "gaussian", "lorentzian", "finite-bandwidth"}));
  fit_width->add_option("--lo", lo, "Window start (THz)");
  fit_width->add_option("--hi", hi, "Window end (THz)");
  fit_width->add_option("--output", out, "Write the result as key = value text");
  fit_width->callback([&] {
    const auto c = load(g, false);
    const auto tr = trace_from_csv(read_text_file(in));
    if (method == "finite-bandwidth") {
      print_fit(fit_finite_bandwidth(tr, c.laser, {lo, hi}), out);
      return;
    }
    const auto m = method == "gaussian"     ? WidthMethod::Gaussian
                   : method == "lorentzian" ? WidthMethod::Lorentzian
                                            : WidthMethod::Interpolated;
    const auto w = fwhm(tr, m, {lo, hi});
    std::string kv = "method = " + std::string(to_string(w.method)) + "\n" +
                     "fwhm = " + std::to_string(w.fwhm_thz) + " THz\n" +
                     "fwhm.sigma = " + std::to_string(w.uncertainty_thz) + " THz\n" +
                     "center = " + std::to_string(w.center_thz) + " THz\n";
    if (!out.empty()) write_text_file(out, kv);
    std::cout << kv;
  });

  double probe_tau = 10.0, probe_t = 10.0, t_max = 6000.0;
  int t_steps = 60;
  auto* tscan = app.add_subcommand("tscan", "Waiting-time scan of S(tau, T, t) at one delay pair");
  tscan->add_option("--tau", probe_tau, "tau (ps)");
  tscan->add_option("--t", probe_t, "t (ps)");
  tscan->add_option("--max", t_max, "Largest waiting time (ps)");
  tscan->add_option("--steps", t_steps, "Number of intervals")->check(CLI::Range(1, 100000));
  tscan->callback([&] {
    const auto c = load(g, true);
    const auto em = sample_ensemble(c.ensemble, c.level_scheme, c.strain_model, c.emitters, c.seed);
    std::vector<double> waits;
    for (int k = 0; k <= t_steps; ++k) waits.push_back(t_max * k / t_steps);
    CsvTable table{{"waiting_time [ps]", "re [arb]", "im [arb]", "amplitude [arb]"}, {}};
    for (const auto mode : c.detection) {
      const auto scan = waiting_time_scan(em, probe_tau, probe_t, waits, synthesis_options(c, mode));
      table.rows.clear();
      for (const auto& s : scan)
        table.rows.push_back({std::to_string(s.waiting_time_ps), std::to_string(s.amplitude.real()),
                              std::to_string(s.amplitude.imag()), std::to_string(std::abs(s.amplitude))});
      const auto path = out_path(g, c, std::string("tscan_") + to_string(mode) + ".csv");
      write_text_file(path, format_csv(table));
      std::cout << path << "\n";
    }
  });

  double reph_re = 1.0, reph_im = 0.0, other = 1.0, rate = 2.0, bandwidth = 2.0, duration = 0.02;
  auto* demod = app.add_subcommand("demod", "Lock-in recovery of the rephasing beat from a pulse train");
  demod->add_option("--re", reph_re, "Rephasing amplitude, real part");
  demod->add_option("--im", reph_im, "Rephasing amplitude, imaginary part");
  demod->add_option("--others", other, "Amplitude of every other tag combination");
  demod->add_option("--rate", rate, "Detector sample rate (MS/s)");
  demod->add_option("--bandwidth", bandwidth, "Filter bandwidth (kHz)");
  demod->add_option("--duration", duration, "Record length (s)");
  demod->callback([&] {
    const auto c = load(g, false);
    const Complex reph(reph_re, reph_im);
    const auto beats = fourth_order_beats(reph, Complex(other, 0.0));
    const double fref = signature_frequency(kRephasingSignature, c.tags);
    const auto rec = simulate_pulse_train(beats, c.tags, duration, rate, c.repetition_rate_mhz);
    const auto got = demodulate(rec, fref, bandwidth);
    std::cout << "reference = " << fref << " MHz\n";
    std::cout << "recovered = " << got.real() << " " << got.imag() << "\n";
    std::cout << "relative_error = " << std::abs(got - reph) / std::abs(reph) << "\n";
  });

  std::string target;
  auto* reproduce = app.add_subcommand("reproduce", "Run a figure reproduction and its checks");
  reproduce->add_option("target", target, "fig1c, fig1d, fig2, fig3, fig4 or t1scan")->required();
  reproduce->callback([&] {
    if (!is_reproduction_target(target)) throw UsageError("unknown target '" + target + "'");
    ReproduceOptions o;
    ExperimentConfig base;
    if (!g.config.empty()) {
      base = load_config(g.config);
      o.base = &base;
    }
    o.out_dir = g.out_dir;
    o.overrides = g.overrides;
    o.has_seed = g.seed.has_value();
    o.seed = g.seed.value_or(0);
    o.threads = g.threads;
    if (g.verbose) o.log = [](const std::string& m) { std::cerr << m << "\n"; };
    const auto r = run_reproduction(target, o);
    std::cout << r.report.render();
    if (!r.report.all_pass()) code = kCheckFailed;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return code;
}
