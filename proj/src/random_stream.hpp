#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mdcs::detail {

// Uniform and Gaussian draws derived from raw mt19937_64 output so that the
// sequence does not depend on the standard library's distribution classes.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Box-Muller pair.
  std::pair<double, double> normal_pair() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mdcs::detail
