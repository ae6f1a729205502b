#include "mdcs/response_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "mdcs/errors.hpp"
#include "random_stream.hpp"

namespace mdcs {

namespace {

constexpr std::size_t kRowBlock = 64;
constexpr std::size_t kTermChunk = 512;

double detection_weight(const Emitter& e, Detection mode) {
  return mode == Detection::Photoluminescence ? e.quantum_yield : 1.0;
}

// Sum over terms for one (tau, t) point, in term order.
Complex point_sum(std::span<const ResponseTerm> terms, double tau, double t) {
  Complex s{0.0, 0.0};
  for (const auto& k : terms) {
    const double g = k.decay_rate_per_ps;
    const double phase = 2.0 * std::numbers::pi *
                         (k.excitation_detuning_thz * tau - k.emission_detuning_thz * t);
    s += k.weight * std::exp(-g * (tau + t)) * Complex(std::cos(phase), std::sin(phase));
  }
  return s;
}

}  // namespace

void TimeGrid::validate() const {
  if (n_tau == 0 || n_t == 0) throw InvalidSpec("grid: point counts must be at least 1");
  if (!(tau_step_ps > 0.0) || !(t_step_ps > 0.0))
    throw InvalidSpec("grid: steps must be positive");
}

const char* to_string(Detection mode) {
  return mode == Detection::Photoluminescence ? "pl" : "heterodyne";
}

std::vector<ResponseTerm> build_response_terms(std::span<const Emitter> emitters,
                                               const SynthesisOptions& options) {
  if (emitters.empty()) throw EmptyEnsemble("no emitters to synthesize");
  options.laser.validate();
  if (!(options.waiting_time_ps >= 0.0)) throw InvalidSpec("waiting time must be non-negative");
  const double frame = options.frame();
  const double peak = options.laser.peak_intensity();

  std::vector<ResponseTerm> terms;
  for (std::size_t ie = 0; ie < emitters.size(); ++ie) {
    const Emitter& e = emitters[ie];
    e.validate();
    const auto nu = e.scheme.transition_frequencies_thz();
    const double mu2 = e.dipole * e.dipole;
    const double base = detection_weight(e, options.mode) * mu2 * mu2 *
                        std::exp(-options.waiting_time_ps / (e.t1_ns * 1e3));
    const double gamma = std::isinf(e.t2_ps) ? 0.0 : 1.0 / e.t2_ps;
    for (const auto& p : enumerate_rephasing_pathways(e.scheme, options.pathways)) {
      const double filt = options.laser.intensity(nu[p.excitation]) / peak *
                          options.laser.intensity(nu[p.emission]) / peak;
      ResponseTerm k;
      k.weight = Complex(p.sign * base * filt, 0.0);
      k.excitation_detuning_thz = nu[p.excitation] - frame;
      k.emission_detuning_thz = nu[p.emission] - frame;
      k.decay_rate_per_ps = gamma;
      k.emitter = ie;
      k.pathway = p;
      terms.push_back(k);
    }
  }
  return terms;
}

double peak_amplitude(std::span<const Emitter> emitters, const SynthesisOptions& options) {
  const auto terms = build_response_terms(emitters, options);
  Complex s{0.0, 0.0};
  for (const auto& k : terms) s += k.weight;
  return std::abs(s);
}

TimeDomainSignal synthesize_signal(std::span<const Emitter> emitters, const TimeGrid& grid,
                                   const SynthesisOptions& options) {
  grid.validate();
  if (!(options.noise_rms >= 0.0)) throw InvalidSpec("noise RMS must be non-negative");
  const auto terms = build_response_terms(emitters, options);

  double max_exc = 0.0, max_emit = 0.0;
  for (const auto& k : terms) {
    max_exc = std::max(max_exc, std::abs(k.excitation_detuning_thz));
    max_emit = std::max(max_emit, std::abs(k.emission_detuning_thz));
  }
  const double nyq_tau = 0.5 / grid.tau_step_ps;
  const double nyq_t = 0.5 / grid.t_step_ps;
  if (nyq_tau < max_exc || nyq_t < max_emit)
    throw GridTooCoarse("grid: Nyquist " + std::to_string(std::min(nyq_tau, nyq_t) * 1e3) +
                        " GHz is below the largest detuning " +
                        std::to_string(std::max(max_exc, max_emit) * 1e3) + " GHz");

  const std::size_t nr = grid.n_tau, nc = grid.n_t;
  ComplexMatrix data = ComplexMatrix::Zero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
  const std::size_t row_blocks = (nr + kRowBlock - 1) / kRowBlock;
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(row_blocks)));

  using Block = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (std::size_t k0 = 0; k0 < terms.size(); k0 += kTermChunk) {
    const std::size_t kn = std::min(kTermChunk, terms.size() - k0);
    Block a(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(kn));
    Block b(static_cast<Eigen::Index>(kn), static_cast<Eigen::Index>(nc));

    auto fill = [&](unsigned w) {
      for (std::size_t k = w; k < kn; k += workers) {
        const auto& term = terms[k0 + k];
        const double g = term.decay_rate_per_ps;
        const double we = 2.0 * std::numbers::pi * term.excitation_detuning_thz;
        const double wm = 2.0 * std::numbers::pi * term.emission_detuning_thz;
        for (std::size_t i = 0; i < nr; ++i) {
          const double tau = grid.tau(i);
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
              term.weight * std::exp(-g * tau) * Complex(std::cos(we * tau), std::sin(we * tau));
        }
        for (std::size_t j = 0; j < nc; ++j) {
          const double t = grid.t(j);
          b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
              std::exp(-g * t) * Complex(std::cos(wm * t), -std::sin(wm * t));
        }
      }
    };
    auto accumulate = [&](unsigned w) {
      for (std::size_t rb = w; rb < row_blocks; rb += workers) {
        const auto r0 = static_cast<Eigen::Index>(rb * kRowBlock);
        const auto rn = static_cast<Eigen::Index>(std::min(kRowBlock, nr - rb * kRowBlock));
        data.middleRows(r0, rn).noalias() += a.middleRows(r0, rn) * b;
      }
    };
    if (workers == 1) {
      fill(0);
      accumulate(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fill, w);
      for (auto& th : pool) th.join();
      pool.clear();
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(accumulate, w);
      for (auto& th : pool) th.join();
    }
  }

  if (options.noise_rms > 0.0)
    add_complex_noise(std::span<Complex>(data.data(), static_cast<std::size_t>(data.size())),
                      options.noise_rms, options.noise_seed);

  TimeDomainSignal out;
  out.grid = grid;
  out.waiting_time_ps = options.waiting_time_ps;
  out.mode = options.mode;
  out.frame_thz = options.frame();
  out.data = std::move(data);
  out.metadata["emitters"] = std::to_string(emitters.size());
  out.metadata["pathway_terms"] = std::to_string(terms.size());
  out.metadata["noise_rms"] = std::to_string(options.noise_rms);
  out.metadata["noise_seed"] = std::to_string(options.noise_seed);
  out.metadata["laser_center_thz"] = std::to_string(options.laser.center_thz);
  out.metadata["laser_fwhm_thz"] = std::to_string(options.laser.fwhm_thz);
  return out;
}

void add_complex_noise(std::span<Complex> values, double rms, std::uint64_t seed) {
  if (!(rms >= 0.0)) throw InvalidSpec("noise RMS must be non-negative");
  if (rms == 0.0) return;
  detail::RandomStream rng(seed);
  const double sigma = rms / std::numbers::sqrt2;
  for (auto& v : values) {
    const auto [x, y] = rng.normal_pair();
    v += Complex(sigma * x, sigma * y);
  }
}

std::vector<Complex> synthesize_points(std::span<const Emitter> emitters,
                                       std::span<const std::pair<double, double>> points,
                                       const SynthesisOptions& options) {
  const auto terms = build_response_terms(emitters, options);
  std::vector<Complex> out(points.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(points.size())));
  auto run = [&](unsigned w) {
    for (std::size_t i = w; i < points.size(); i += workers)
      out[i] = point_sum(terms, points[i].first, points[i].second);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<WaitingTimeSample> waiting_time_scan(std::span<const Emitter> emitters,
                                                 double tau_ps, double t_ps,
                                                 std::span<const double> waiting_times_ps,
                                                 const SynthesisOptions& options) {
  if (waiting_times_ps.empty()) throw InvalidSpec("waiting-time scan: empty T list");
  if (!(tau_ps >= 0.0) || !(t_ps >= 0.0)) throw InvalidSpec("waiting-time scan: negative delay");
  std::vector<WaitingTimeSample> out;
  out.reserve(waiting_times_ps.size());
  for (double T : waiting_times_ps) {
    if (!(T >= 0.0)) throw InvalidSpec("waiting-time scan: negative T");
    SynthesisOptions o = options;
    o.waiting_time_ps = T;
    const auto terms = build_response_terms(emitters, o);
    out.push_back({T, point_sum(terms, tau_ps, t_ps)});
  }
  return out;
}

}  // namespace mdcs
