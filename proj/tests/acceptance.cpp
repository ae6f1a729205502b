// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   mdcs_acceptance [output_dir]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mdcs/csv.hpp"
#include "mdcs/dataset.hpp"
#include "mdcs/reproduce.hpp"
#include "mdcs/spectral_transform.hpp"
#include "oracle.hpp"
#include "properties.hpp"

namespace fs = std::filesystem;
using namespace mdcs;

namespace {

struct Run {
  Reproduction result;
  double seconds = 0.0;
};

Run reproduce(const std::string& target, const fs::path& dir) {
  ReproduceOptions o;
  o.out_dir = dir.string();
  const auto t0 = std::chrono::steady_clock::now();
  Run r{run_reproduction(target, o), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Checks of a report whose names start with one of the prefixes.
bool checks_pass(const Report& r, const std::vector<std::string>& prefixes, std::string& detail) {
  bool ok = true;
  bool any = false;
  for (const auto& c : r.checks) {
    bool match = prefixes.empty();
    for (const auto& p : prefixes) match = match || c.name.rfind(p, 0) == 0;
    if (!match) continue;
    any = true;
    ok = ok && c.pass;
    detail += (detail.empty() ? "" : "; ") + c.name + "=" + fmt(c.value) + (c.unit.empty() ? "" : " " + c.unit) +
              (c.pass ? "" : " [FAIL]");
  }
  return any && ok;
}

int failures = 0;

void line(int n, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-28s %s  %s\n", n, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::vector<Emitter> oracle_emitters() {
  std::vector<Emitter> e(3);
  const double nu[] = {406.72, 406.93, 404.80};
  const double t2[] = {122.0, 990.0, 60.0};
  const double mu[] = {1.0, 0.7, 1.4};
  const double y[] = {1.0, 0.4, 0.05};
  for (int k = 0; k < 3; ++k) {
    e[k].scheme = LevelScheme::two_level_at(nu[k]);
    e[k].t2_ps = t2[k];
    e[k].dipole = mu[k];
    e[k].quantum_yield = y[k];
  }
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(root);

  std::map<std::string, Run> first, second;
  for (const auto& t : reproduction_targets()) first[t] = reproduce(t, root / "run1");

  {
    std::string d;
    const bool ok = checks_pass(first["fig1c"].result.report, {"bright."}, d);
    const bool fast = first["fig1c"].seconds < 120.0;
    line(1, "line positions", ok && fast, d + "; runtime=" + fmt(first["fig1c"].seconds) + " s");
  }
  {
    std::string d;
    line(2, "bright inhomogeneous width", checks_pass(first["fig2"].result.report, {"bright."}, d), d);
  }
  {
    std::string d;
    bool ok = checks_pass(first["fig2"].result.report, {"hidden."}, d);
    ok = checks_pass(first["fig1d"].result.report, {"hidden."}, d) && ok;
    line(3, "hidden inhomogeneous width", ok, d);
  }
  {
    std::string d;
    line(4, "dephasing fits", checks_pass(first["fig4"].result.report, {}, d), d);
  }
  {
    const auto r = props::echo_comparison(0.028, 1.84);
    line(5, "echo property", r.rms_deviation < 0.02,
         "rms_deviation=" + fmt(r.rms_deviation) + " over " + fmt(r.window_ps) +
             " ps; fid_ratio=" + fmt(r.fid_ratio));
  }
  {
    std::string d;
    line(6, "yield property suite", checks_pass(first["fig3"].result.report, {}, d), d);
  }
  {
    const auto e = oracle_emitters();
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::size_t n = 1; n <= 3; ++n)
      for (auto mode : {Detection::Heterodyne, Detection::Photoluminescence})
        for (double T : {0.5, 1000.0}) {
          SynthesisOptions o;
          o.mode = mode;
          o.waiting_time_ps = T;
          o.laser = LaserSpectrum::from_wavelength(737.0, 7.5);
          const std::span<const Emitter> em(e.data(), n);
          std::vector<std::pair<double, double>> pts;
          for (double tau : {0.0, 2.5, 40.0, 300.0})
            for (double t : {0.0, 0.7, 90.0, 500.0}) pts.push_back({tau, t});
          const auto fast = synthesize_points(em, pts, o);
          std::vector<oracle::C> ref;
          for (const auto& [tau, t] : pts) ref.push_back(oracle::density_matrix_signal(em, tau, T, t, o));
          worst = std::max(worst, oracle::relative_error(fast, ref));
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    line(7, "density-matrix oracle", worst < 1e-6 && secs < 30.0,
         "max_relative_error=" + fmt(worst) + "; runtime=" + fmt(secs) + " s");
  }
  {
    std::string d;
    line(8, "demodulation", checks_pass(first["fig1c"].result.report, {"lockin."}, d), d);
  }
  {
    std::string d;
    line(9, "T1 scan", checks_pass(first["t1scan"].result.report, {}, d), d);
  }
  {
    // Parseval on the stored bright signal, with and without padding.
    const auto sig = signal_from_dataset(read_dataset((root / "run1" / "fig1c" / "bright_pl_signal.mdcs").string()));
    double parseval = 0.0;
    for (int pad : {1, 2}) {
      SpectrumOptions so;
      so.pad_factor = pad;
      const auto f = to_spectrum(sig, so);
      const double n = static_cast<double>(f.data.rows() * f.data.cols());
      const double lhs = f.data.cwiseAbs2().sum(), rhs = n * sig.data.cwiseAbs2().sum();
      parseval = std::max(parseval, std::abs(lhs - rhs) / rhs);
    }
    double jac = 0.0;
    for (const auto& c : oracle::jacobian_cases()) jac = std::max(jac, oracle::jacobian_error(c.spec, c.x, c.p));

    std::size_t files = 0, mismatched = 0;
    for (const auto& t : reproduction_targets()) {
      second[t] = reproduce(t, root / "run2");
      for (const auto& f : first[t].result.files) {
        const auto rel = fs::relative(f, root / "run1");
        ++files;
        if (read_text_file(f) != read_text_file((root / "run2" / rel).string())) {
          ++mismatched;
          std::printf("  differs: %s\n", rel.string().c_str());
        }
      }
      if (second[t].result.files.size() != first[t].result.files.size()) ++mismatched;
    }
    line(10, "numerical hygiene", parseval < 1e-10 && jac < 1e-6 && mismatched == 0 && files > 0,
         "parseval=" + fmt(parseval) + "; jacobian=" + fmt(jac) + "; identical_files=" +
             std::to_string(files - mismatched) + "/" + std::to_string(files));
  }

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
