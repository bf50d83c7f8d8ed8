#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nubound {

/// Seeded generator with platform-independent real draws.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so reals are formed from the raw 53 high bits.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Log-uniform magnitude on [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

private:
  std::mt19937_64 engine_;
};

} // namespace nubound
