#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "conformal/conformal.hpp"

namespace conformal::testing {

/// Seeded source of test inputs; every suite uses a fixed seed.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  Int integer(Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(engine_); }

  /// A point of Sigma with a in [a_lo, a_hi] and b strictly between 1/a and a.
  Parameters sigma_point(double a_lo = 1.05, double a_hi = 20.0) {
    const double a = uniform(a_lo, a_hi);
    const double lo = 1.0 / a, hi = a;
    const double b = lo + (hi - lo) * uniform(0.02, 0.98);
    return {a, b};
  }

  /// A modulus of Omega with denominator at most max_den.
  Modulus omega_rational(Int max_den = 60) {
    for (;;) {
      const Int d1 = integer(2, max_den), d2 = integer(2, max_den);
      const Rational q1(integer(1, d1 - 1), d1), q2(integer(1, d2 - 1), d2);
      if (in_omega(q1, q2)) return {q1, q2};
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline double max_abs(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

}  // namespace conformal::testing
