#include "irsmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace irsmc {

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair so neighbouring seeds decorrelate
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z = z ^ (z >> 31);
  return Rng(z);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

Complex Rng::unit_phase() {
  return std::polar(1.0, 2.0 * std::numbers::pi * uniform());
}

} // namespace irsmc
