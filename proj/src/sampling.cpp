#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mdcs/emitter_model.hpp"
#include "mdcs/errors.hpp"

namespace mdcs {

namespace {

// 53-bit uniform in [0, 1) built directly from the engine output, so the
// stream is identical across standard library implementations.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Open interval (0, 1) for quantile transforms.
  double next_open() {
    double u;
    do {
      u = next();
    } while (u == 0.0);
    return u;
  }

 private:
  std::mt19937_64 engine_;
};

std::size_t categorical(double u, std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  return weights.size() - 1;
}

double strain_quantile(const StrainDistribution& d, double u) {
  switch (d.shape) {
    case StrainShape::Delta:
      return d.center;
    case StrainShape::Gaussian:
      return d.center + d.fwhm / kGaussianFwhmPerSigma * normal_quantile(u);
    case StrainShape::Lorentzian:
      return d.center + 0.5 * d.fwhm * std::tan(std::numbers::pi * (u - 0.5));
  }
  return d.center;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInfinity;
    if (p == 1.0) return kInfinity;
    return std::numeric_limits<double>::quiet_NaN();
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::vector<Emitter> sample_ensemble(const EnsembleSpec& spec, const LevelScheme& base,
                                     const StrainModel& model, std::size_t n,
                                     std::uint64_t seed) {
  if (n == 0) throw InvalidSpec("ensemble: emitter count must be at least 1");
  spec.validate();
  base.validate();
  model.validate();

  UniformStream rng(seed);
  std::vector<double> weights;
  for (const auto& c : spec.components) weights.push_back(c.weight);

  std::vector<std::size_t> membership(n);
  for (auto& m : membership) m = categorical(rng.next(), weights);

  std::vector<Emitter> out(n);
  for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
    const auto& comp = spec.components[ci];
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (membership[i] == ci) members.push_back(i);
    const std::size_t m = members.size();
    if (m == 0) continue;

    // Random assignment of strata to members (Fisher-Yates).
    std::vector<std::size_t> stratum(m);
    for (std::size_t k = 0; k < m; ++k) stratum[k] = k;
    for (std::size_t k = m - 1; k > 0; --k) {
      const auto j = static_cast<std::size_t>(rng.next() * static_cast<double>(k + 1));
      std::swap(stratum[k], stratum[std::min(j, k)]);
    }

    const LevelScheme comp_base = comp.two_level ? LevelScheme::two_level_at(base.center_thz) : base;
    std::vector<double> class_weights;
    for (const auto& k : comp.dephasing.classes) class_weights.push_back(k.weight);

    for (std::size_t k = 0; k < m; ++k) {
      Emitter& e = out[members[k]];
      const double u = (static_cast<double>(stratum[k]) + rng.next_open()) / static_cast<double>(m);
      e.strain = strain_quantile(comp.strain, std::clamp(u, 1e-300, 1.0 - 1e-16));
      e.scheme = strained_level_scheme(comp_base, model, e.strain);
      e.dipole = comp.dipole;
      e.t1_ns = comp.t1_ns;
      e.component = static_cast<int>(ci);
      switch (comp.dephasing.rule) {
        case DephasingRule::Constant:
          e.t2_ps = comp.dephasing.t2_ps;
          break;
        case DephasingRule::Classes:
          e.t2_ps = comp.dephasing.classes[categorical(rng.next(), class_weights)].t2_ps;
          break;
        case DephasingRule::LogNormal:
          e.t2_ps = comp.dephasing.lognormal_median_ps *
                    std::exp(comp.dephasing.lognormal_sigma * normal_quantile(rng.next_open()));
          break;
      }
      e.t2_ps = std::min(e.t2_ps, 2.0 * e.t1_ns * 1e3);
      e.quantum_yield = comp.yield_rule == YieldRule::Fixed ? comp.fixed_yield
                                                            : quantum_yield(model, e.strain);
      e.validate();
    }
  }
  return out;
}

}  // namespace mdcs
