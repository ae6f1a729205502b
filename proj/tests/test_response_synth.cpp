#include <chrono>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mdcs/errors.hpp"
#include "mdcs/response_synth.hpp"
#include "oracle.hpp"

using namespace mdcs;

namespace {

std::vector<Emitter> three_two_level_emitters() {
  std::vector<Emitter> e(3);
  const double nu[] = {406.70, 406.95, 404.60};
  const double t2[] = {122.0, 990.0, 45.0};
  const double mu[] = {1.0, 0.6, 1.7};
  const double y[] = {1.0, 0.35, 0.02};
  const double t1[] = {1.7, 0.9, 2.5};
  for (int k = 0; k < 3; ++k) {
    e[k].scheme = LevelScheme::two_level_at(nu[k]);
    e[k].t2_ps = t2[k];
    e[k].dipole = mu[k];
    e[k].quantum_yield = y[k];
    e[k].t1_ns = t1[k];
  }
  return e;
}

SynthesisOptions options(Detection mode, double T) {
  SynthesisOptions o;
  o.mode = mode;
  o.waiting_time_ps = T;
  o.laser = LaserSpectrum::from_wavelength(737.0, 7.5);
  return o;
}

}  // namespace

TEST_CASE("pathway sum equals density-matrix propagation") {
  const auto all = three_two_level_emitters();
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::span<const Emitter> em(all.data(), n);
    for (auto mode : {Detection::Heterodyne, Detection::Photoluminescence}) {
      for (double T : {0.0, 0.5, 800.0}) {
        const auto opt = options(mode, T);
        std::vector<std::pair<double, double>> pts;
        for (double tau : {0.0, 0.37, 13.0, 150.0})
          for (double t : {0.0, 1.1, 77.0, 410.0}) pts.push_back({tau, t});
        const auto fast = synthesize_points(em, pts, opt);
        std::vector<oracle::C> ref;
        for (const auto& [tau, t] : pts)
          ref.push_back(oracle::density_matrix_signal(em, tau, T, t, opt));
        CHECK(oracle::relative_error(fast, ref) < 1e-6);
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 30.0);
}

TEST_CASE("PL weight is the yield times the heterodyne weight") {
  const auto e = three_two_level_emitters();
  const auto het = build_response_terms(e, options(Detection::Heterodyne, 0.5));
  const auto pl = build_response_terms(e, options(Detection::Photoluminescence, 0.5));
  REQUIRE(het.size() == pl.size());
  for (std::size_t k = 0; k < het.size(); ++k)
    CHECK(std::abs(pl[k].weight - e[het[k].emitter].quantum_yield * het[k].weight) <
          1e-15 * std::abs(het[k].weight));
}

TEST_CASE("waiting time enters as exp(-T/T1)") {
  std::vector<Emitter> e(1);
  e[0].t1_ns = 1.7;
  auto o = options(Detection::Heterodyne, 0.0);
  std::vector<double> T{0.0, 1700.0, 3400.0};
  const auto scan = waiting_time_scan(e, 10.0, 10.0, T, o);
  CHECK(std::abs(scan[1].amplitude) / std::abs(scan[0].amplitude) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(std::abs(scan[2].amplitude) / std::abs(scan[0].amplitude) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("grid synthesis agrees with point synthesis and is thread independent") {
  std::vector<Emitter> e;
  for (int k = 0; k < 300; ++k) {
    Emitter x;
    x.scheme.center_thz = 406.814 + 0.0005 * (k - 150);
    x.t2_ps = 100.0 + k;
    e.push_back(x);
  }
  auto o = options(Detection::Heterodyne, 0.5);
  const auto grid = TimeGrid{70, 90, 1.171875, 0.9};
  o.threads = 1;
  const auto a = synthesize_signal(e, grid, o);
  o.threads = 4;
  const auto b = synthesize_signal(e, grid, o);
  o.threads = 3;
  const auto c = synthesize_signal(e, grid, o);
  CHECK(a.data == b.data);
  CHECK(a.data == c.data);
  CHECK(a.frame_thz == o.laser.center_thz);

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < grid.n_tau; i += 13)
    for (std::size_t j = 0; j < grid.n_t; j += 11) pts.push_back({grid.tau(i), grid.t(j)});
  const auto p = synthesize_points(e, pts, o);
  std::size_t q = 0;
  for (std::size_t i = 0; i < grid.n_tau; i += 13)
    for (std::size_t j = 0; j < grid.n_t; j += 11, ++q)
      CHECK(std::abs(p[q] - a.data(i, j)) < 1e-9 * std::abs(a.data(0, 0)));
  CHECK(std::abs(a.data(0, 0)) == doctest::Approx(peak_amplitude(e, o)).epsilon(1e-12));
}

TEST_CASE("synthesis errors") {
  const std::vector<Emitter> none;
  const auto o = options(Detection::Heterodyne, 0.5);
  CHECK_THROWS_AS(synthesize_signal(none, TimeGrid::square(8, 1.0), o), EmptyEnsemble);
  std::vector<Emitter> e(1);
  e[0].scheme = LevelScheme::two_level_at(406.0);
  // A 1 ps step cannot carry a 0.8 THz detuning without aliasing.
  CHECK_THROWS_AS(synthesize_signal(e, TimeGrid::square(16, 1.0), o), GridTooCoarse);
  CHECK_NOTHROW(synthesize_signal(e, TimeGrid::square(16, 0.1), o));
  auto bad = o;
  bad.waiting_time_ps = -1.0;
  CHECK_THROWS_AS(build_response_terms(e, bad), InvalidSpec);
}

TEST_CASE("complex white noise has the requested RMS") {
  std::vector<Complex> v(200000);
  add_complex_noise(v, 0.3, 17);
  double re2 = 0.0, im2 = 0.0, reim = 0.0, mean = 0.0;
  for (const auto& z : v) {
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    reim += z.real() * z.imag();
    mean += z.real();
  }
  const double n = static_cast<double>(v.size());
  CHECK(std::sqrt((re2 + im2) / n) == doctest::Approx(0.3).epsilon(0.01));
  CHECK(re2 / n == doctest::Approx(im2 / n).epsilon(0.02));
  CHECK(std::abs(reim / n) < 0.003);
  CHECK(std::abs(mean / n) < 0.003);

  std::vector<Complex> w(200000);
  add_complex_noise(w, 0.3, 17);
  CHECK(v == w);
}
