#pragma once

#include <cstdint>
#include <random>

#include "irsmc/types.hpp"

namespace irsmc {

/// Seeded random stream with platform-independent uniform and normal draws.
///
/// std::uniform_real_distribution and std::normal_distribution are
/// implementation-defined, so the transforms are written out here to keep a
/// fixed seed reproducing identical channels on every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream derived from (seed, stream id); distinct ids give unrelated draws.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance);
  /// e^{j psi} with psi uniform on [0, 2 pi).
  Complex unit_phase();

  std::mt19937_64 &engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

} // namespace irsmc
