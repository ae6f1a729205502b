#include "mdcs/emitter_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdcs/errors.hpp"

namespace mdcs {

std::vector<Transition> LevelScheme::transitions() const {
  if (two_level) return {{0, 0, center_thz}};
  const double dg = ground_splitting_ghz * 1e-3;
  const double de = excited_splitting_ghz * 1e-3;
  return {
      {1, 0, center_thz - 0.5 * (de + dg)},
      {0, 0, center_thz - 0.5 * (de - dg)},
      {1, 1, center_thz + 0.5 * (de - dg)},
      {0, 1, center_thz + 0.5 * (de + dg)},
  };
}

std::vector<double> LevelScheme::transition_frequencies_thz() const {
  std::vector<double> out;
  for (const auto& tr : transitions()) out.push_back(tr.frequency_thz);
  return out;
}

void LevelScheme::validate() const {
  if (!std::isfinite(center_thz) || center_thz <= 0.0)
    throw InvalidSpec("level scheme: center frequency must be positive");
  if (two_level) return;
  if (!(ground_splitting_ghz > 0.0) || !(excited_splitting_ghz > 0.0)) {
    std::ostringstream os;
    os << "level scheme: splittings must be positive (ground " << ground_splitting_ghz
       << " GHz, excited " << excited_splitting_ghz << " GHz)";
    throw SplittingCollapse(os.str());
  }
  const auto f = transition_frequencies_thz();
  if (!std::is_sorted(f.begin(), f.end(), std::less_equal<>{}) ||
      std::adjacent_find(f.begin(), f.end()) != f.end())
    throw InvalidSpec("level scheme: transition frequencies must be strictly increasing");
}

LevelScheme solve_level_scheme(std::span<const double, 4> f) {
  // Each line is nu0 + a*De/2 + b*Dg/2 with (a, b) in {(-1,-1), (-1,+1), (+1,-1), (+1,+1)};
  // the columns are orthogonal, so the normal equations decouple.
  LevelScheme s;
  s.center_thz = 0.25 * (f[0] + f[1] + f[2] + f[3]);
  s.excited_splitting_ghz = 0.5 * ((f[2] + f[3]) - (f[0] + f[1])) * 1e3;
  s.ground_splitting_ghz = 0.5 * ((f[1] - f[0]) + (f[3] - f[2])) * 1e3;
  s.two_level = false;
  return s;
}

void StrainModel::validate() const {
  if (!std::isfinite(shift_thz_per_unit))
    throw InvalidSpec("strain model: shift coefficient must be finite");
  if (!(bright_yield > 0.0 && bright_yield <= 1.0))
    throw InvalidSpec("strain model: bright-limit yield must lie in (0, 1]");
  if (!(yield_crossover > 0.0))
    throw InvalidSpec("strain model: yield crossover must be positive");
  if (!(yield_steepness > 0.0))
    throw InvalidSpec("strain model: yield steepness must be positive");
}

LevelScheme strained_level_scheme(const LevelScheme& base, const StrainModel& model,
                                  double strain) {
  LevelScheme out = base;
  const double mag = std::abs(strain);
  out.center_thz = base.center_thz + model.shift_thz_per_unit * strain;
  if (!base.two_level) {
    out.ground_splitting_ghz = base.ground_splitting_ghz + model.ground_splitting_ghz_per_unit * mag;
    out.excited_splitting_ghz =
        base.excited_splitting_ghz + model.excited_splitting_ghz_per_unit * mag;
  }
  out.validate();
  return out;
}

double quantum_yield(const StrainModel& model, double strain) {
  const double x = std::abs(strain) / model.yield_crossover;
  const double y = model.bright_yield / (1.0 + std::pow(x, model.yield_steepness));
  // Keep the yield strictly positive even when the power overflows.
  return std::max(y, std::numeric_limits<double>::min());
}

void Emitter::validate() const {
  if (!(dipole > 0.0)) throw InvalidSpec("emitter: dipole must be positive");
  if (!(t2_ps > 0.0) || !(t1_ns > 0.0)) throw InvalidSpec("emitter: T1 and T2 must be positive");
  if (t2_ps > 2.0 * t1_ns * 1e3) throw InvalidSpec("emitter: T2 exceeds 2*T1");
  if (!(quantum_yield > 0.0 && quantum_yield <= 1.0))
    throw InvalidSpec("emitter: quantum yield must lie in (0, 1]");
}

void EnsembleSpec::validate() const {
  if (components.empty()) throw InvalidSpec("ensemble: no population components");
  double total = 0.0;
  for (const auto& c : components) {
    const std::string where = "ensemble component '" + c.name + "': ";
    if (!(c.weight >= 0.0)) throw InvalidSpec(where + "weight must be non-negative");
    total += c.weight;
    if (c.strain.shape != StrainShape::Delta && !(c.strain.fwhm > 0.0))
      throw InvalidSpec(where + "strain FWHM must be positive");
    if (!(c.dipole > 0.0)) throw InvalidSpec(where + "dipole must be positive");
    if (!(c.t1_ns > 0.0)) throw InvalidSpec(where + "T1 must be positive");
    if (c.yield_rule == YieldRule::Fixed && !(c.fixed_yield > 0.0 && c.fixed_yield <= 1.0))
      throw InvalidSpec(where + "fixed yield must lie in (0, 1]");
    const auto& d = c.dephasing;
    switch (d.rule) {
      case DephasingRule::Constant:
        if (!(d.t2_ps > 0.0)) throw InvalidSpec(where + "T2 must be positive");
        break;
      case DephasingRule::Classes: {
        if (d.classes.empty()) throw InvalidSpec(where + "empty T2 class list");
        double w = 0.0;
        for (const auto& k : d.classes) {
          if (!(k.t2_ps > 0.0) || !(k.weight >= 0.0))
            throw InvalidSpec(where + "T2 classes need positive times and non-negative weights");
          w += k.weight;
        }
        if (std::abs(w - 1.0) > 1e-9) throw InvalidSpec(where + "T2 class weights must sum to 1");
        break;
      }
      case DephasingRule::LogNormal:
        if (!(d.lognormal_median_ps > 0.0) || !(d.lognormal_sigma >= 0.0))
          throw InvalidSpec(where + "log-normal T2 needs positive median and non-negative sigma");
        break;
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "ensemble: component weights sum to " << total << ", expected 1";
    throw InvalidSpec(os.str());
  }
}

LaserSpectrum LaserSpectrum::gaussian(double center_thz, double fwhm_thz) {
  LaserSpectrum l;
  l.center_thz = center_thz;
  l.fwhm_thz = fwhm_thz;
  l.shape = LaserShape::Gaussian;
  return l;
}

LaserSpectrum LaserSpectrum::flat(double center_thz) {
  LaserSpectrum l;
  l.center_thz = center_thz;
  l.fwhm_thz = kInfinity;
  l.shape = LaserShape::Flat;
  return l;
}

LaserSpectrum LaserSpectrum::from_wavelength(double center_nm, double bandwidth_nm) {
  const double lambda = center_nm * 1e-9;
  const double center = kSpeedOfLight / lambda * 1e-12;
  const double fwhm = kSpeedOfLight * bandwidth_nm * 1e-9 / (lambda * lambda) * 1e-12;
  return gaussian(center, fwhm);
}

LaserSpectrum LaserSpectrum::tabulated(std::vector<double> nu_thz, std::vector<double> value) {
  LaserSpectrum l;
  l.shape = LaserShape::Tabulated;
  l.table_thz = std::move(nu_thz);
  l.table_value = std::move(value);
  l.validate();
  const auto peak = std::max_element(l.table_value.begin(), l.table_value.end());
  const double scale = *peak;
  l.center_thz = l.table_thz[static_cast<std::size_t>(peak - l.table_value.begin())];
  for (double& v : l.table_value) v /= scale;
  l.fwhm_thz = 0.0;
  return l;
}

double LaserSpectrum::intensity(double nu) const {
  switch (shape) {
    case LaserShape::Flat:
      return 1.0;
    case LaserShape::Gaussian: {
      const double sigma = fwhm_thz / kGaussianFwhmPerSigma;
      const double x = (nu - center_thz) / sigma;
      return std::exp(-0.5 * x * x);
    }
    case LaserShape::Tabulated: {
      if (nu < table_thz.front() || nu > table_thz.back()) return 0.0;
      const auto hi = std::upper_bound(table_thz.begin(), table_thz.end(), nu);
      if (hi == table_thz.end()) return table_value.back();
      const auto i = static_cast<std::size_t>(hi - table_thz.begin());
      const double w = (nu - table_thz[i - 1]) / (table_thz[i] - table_thz[i - 1]);
      return (1.0 - w) * table_value[i - 1] + w * table_value[i];
    }
  }
  return 0.0;
}

double LaserSpectrum::field(double nu) const { return std::sqrt(intensity(nu)); }

double LaserSpectrum::peak_intensity() const {
  if (shape == LaserShape::Tabulated)
    return *std::max_element(table_value.begin(), table_value.end());
  return 1.0;
}

void LaserSpectrum::validate() const {
  switch (shape) {
    case LaserShape::Flat:
      return;
    case LaserShape::Gaussian:
      if (!(fwhm_thz > 0.0) || !std::isfinite(fwhm_thz))
        throw InvalidSpec("laser: Gaussian FWHM must be positive and finite");
      return;
    case LaserShape::Tabulated:
      if (table_thz.size() < 2 || table_thz.size() != table_value.size())
        throw InvalidSpec("laser: table needs at least two (frequency, value) rows");
      for (std::size_t i = 0; i < table_thz.size(); ++i) {
        if (!(table_value[i] > 0.0)) throw InvalidSpec("laser: table values must be positive");
        if (i > 0 && !(table_thz[i] > table_thz[i - 1]))
          throw InvalidSpec("laser: table frequencies must be strictly increasing");
      }
      return;
  }
}

}  // namespace mdcs
