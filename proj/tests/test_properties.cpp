#include <cmath>
#include <vector>

#include "doctest.h"
#include "mdcs/config.hpp"
#include "mdcs/lineshape_fit.hpp"
#include "mdcs/reproduce.hpp"
#include "mdcs/response_synth.hpp"
#include "mdcs/spectral_transform.hpp"
#include "properties.hpp"

using namespace mdcs;

TEST_CASE("echo decay does not depend on the inhomogeneous width") {
  const auto r = props::echo_comparison(0.028, 1.84);
  CHECK(r.rms_deviation < 0.02);
  // The free-induction decay, by contrast, is set by the inhomogeneous width.
  CHECK(r.fid_ratio < 0.05);
}

TEST_CASE("PL and heterodyne spectra are proportional under a flat yield") {
  EnsembleSpec spec;
  PopulationComponent c;
  c.name = "flat";
  c.strain = {StrainShape::Gaussian, 0.0, 0.2};
  c.yield_rule = YieldRule::Fixed;
  c.fixed_yield = 0.35;
  spec.components = {c};
  const auto e = sample_ensemble(spec, LevelScheme::siv_default(), {}, 200, 2);
  SynthesisOptions o;
  o.laser = LaserSpectrum::from_wavelength(737.0, 7.5);
  const auto grid = TimeGrid::square(64, 0.1);
  o.mode = Detection::Heterodyne;
  const auto het = to_spectrum(synthesize_signal(e, grid, o));
  o.mode = Detection::Photoluminescence;
  const auto pl = to_spectrum(synthesize_signal(e, grid, o));
  const double dev = (pl.data - 0.35 * het.data).cwiseAbs().maxCoeff() / het.data.cwiseAbs().maxCoeff();
  CHECK(dev < 1e-12);
}

TEST_CASE("bright projection width approaches the input distribution for long T2") {
  const double w = props::bright_projection_width_ghz(3400.0);
  CHECK(w == doctest::Approx(28.0).epsilon(0.1));
}
