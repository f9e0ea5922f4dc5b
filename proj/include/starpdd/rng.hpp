#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace starpdd {

/// Deterministic, cross-platform random source. std::mt19937_64 produces a
/// standard-mandated bit stream; the uniform/normal transforms below replace
/// the implementation-defined std:: distributions so that a seed yields the
/// same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Unit-variance circularly-symmetric complex Gaussian CN(0,1).
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {M_SQRT1_2 * re, M_SQRT1_2 * im};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace starpdd
