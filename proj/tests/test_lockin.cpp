#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "mdcs/errors.hpp"
#include "mdcs/lockin.hpp"

using namespace mdcs;

namespace {

// |H(e^{iw})|^4 of y[n] = y[n-1] + a (x[n] - y[n-1]).
double discrete_gain(double offset_hz, double bw_hz, double fs) {
  const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * bw_hz / fs);
  const std::complex<double> z = std::polar(1.0, -2.0 * std::numbers::pi * offset_hz / fs);
  return std::pow(std::abs(a / (1.0 - (1.0 - a) * z)), 4);
}

}  // namespace

TEST_CASE("beat catalogue") {
  const auto beats = fourth_order_beats({1.0, 0.5}, {2.0, 0.0});
  int rephasing = 0;
  for (const auto& b : beats) {
    int sum = 0;
    for (int v : b.signature) sum += v;
    CHECK(sum == 0);
    if (b.signature == kRephasingSignature) {
      ++rephasing;
      CHECK(b.amplitude == std::complex<double>(1.0, 0.5));
    } else {
      CHECK(b.amplitude == std::complex<double>(2.0, 0.0));
    }
  }
  CHECK(rephasing == 1);
  // 18 nonzero zero-sum signatures, one representative per conjugate pair.
  CHECK(beats.size() == 9);
}

TEST_CASE("recovered rephasing amplitude and suppression of other beats") {
  const std::complex<double> a{0.8, -0.35};
  const auto beats = fourth_order_beats(a, {50.0, 20.0});
  const auto tags = TagSet::defaults();
  const auto rec = simulate_pulse_train(beats, tags, 0.02, 2.0, 76.0, 3.0);
  const double ref = signature_frequency(kRephasingSignature, tags);
  const auto z = demodulate(rec, ref, 2.0);
  CHECK(std::abs(z - a) / std::abs(a) < 0.01);

  const auto only_others = simulate_pulse_train(fourth_order_beats({}, {1.0, 0.0}), tags, 0.02, 2.0);
  const double leak = std::abs(demodulate(only_others, ref, 2.0));
  CHECK(20.0 * std::log10(1.0 / leak) >= 60.0);
}

TEST_CASE("demodulator gain follows the cascaded single-pole response") {
  const double fs = 2e6, bw = 2e3;
  for (double df : {0.0, 500.0, 2000.0, 7000.0}) {
    std::vector<BeatComponent> one{{kRephasingSignature, {1.0, 0.0}}};
    const auto rec = simulate_pulse_train(one, TagSet::defaults(), 0.05, fs * 1e-6);
    const double ref = signature_frequency(kRephasingSignature, TagSet::defaults()) + df * 1e-6;
    const double g = std::abs(demodulate(rec, ref, bw * 1e-3));
    CHECK(g == doctest::Approx(discrete_gain(df, bw, fs)).epsilon(2e-3));
    CHECK(g == doctest::Approx(lockin_filter_gain(df * 1e-3, bw * 1e-3)).epsilon(0.02));
  }
  CHECK(lockin_filter_gain(0.0, 2.0) == 1.0);
  CHECK(lockin_filter_gain(2.0, 2.0) == doctest::Approx(0.25));
}

TEST_CASE("lock-in error conditions") {
  const auto beats = fourth_order_beats({1.0, 0.0}, {1.0, 0.0});
  const auto tags = TagSet::defaults();
  // The fastest beat is near 0.3 MHz, so 1 MS/s is not enough.
  CHECK_THROWS_AS(simulate_pulse_train(beats, tags, 0.02, 1.0), AliasError);
  // The slowest beat is 21 kHz: two periods need about 95 us.
  CHECK_THROWS_AS(simulate_pulse_train(beats, tags, 5e-5, 2.0), InsufficientRecord);
  CHECK_THROWS_AS(simulate_pulse_train(beats, tags, 0.02, 100.0, 76.0), InvalidSpec);

  const auto rec = simulate_pulse_train(beats, tags, 0.002, 2.0);
  CHECK_THROWS_AS(demodulate(rec, 1.5, 2.0), AliasError);
  CHECK_THROWS_AS(demodulate(rec, 0.021, 2.0), InsufficientRecord);
  CHECK_THROWS_AS(demodulate(rec, 0.021, 0.0), InvalidSpec);
}
