#pragma once

// Complete elliptic integrals and Jacobi elliptic functions.
//
// Everything uses the *parameter* convention: m multiplies sin^2 under the
// square root, so K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "conformal/errors.hpp"

namespace conformal {

namespace detail {

/// Carlson's degenerate form R_C(x, y), y > 0.
inline double carlson_rc(double x, double y) {
  constexpr double kErrTol = 0.0012;
  if (y <= 0.0) throw DomainError("carlson_rc: y must be positive");
  double xt = x, yt = y;
  double ave = 0.0, s = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double alamb = 2.0 * std::sqrt(xt) * std::sqrt(yt) + yt;
    xt = 0.25 * (xt + alamb);
    yt = 0.25 * (yt + alamb);
    ave = (xt + yt + yt) / 3.0;
    s = (yt - ave) / ave;
    if (std::abs(s) < kErrTol) break;
  }
  constexpr double c1 = 0.3, c2 = 1.0 / 7.0, c3 = 0.375, c4 = 9.0 / 22.0;
  return (1.0 + s * s * (c1 + s * (c2 + s * (c3 + s * c4)))) / std::sqrt(ave);
}

}  // namespace detail

/// Carlson's symmetric integral R_F(x, y, z); at most one argument may vanish.
inline double carlson_rf(double x, double y, double z) {
  constexpr double kErrTol = 0.0008;
  if (std::min({x, y, z}) < 0.0 || std::min({x + y, x + z, y + z}) == 0.0)
    throw DomainError("carlson_rf: invalid arguments");
  double xt = x, yt = y, zt = z;
  double ave = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
    const double alamb = sx * (sy + sz) + sy * sz;
    xt = 0.25 * (xt + alamb);
    yt = 0.25 * (yt + alamb);
    zt = 0.25 * (zt + alamb);
    ave = (xt + yt + zt) / 3.0;
    dx = (ave - xt) / ave;
    dy = (ave - yt) / ave;
    dz = (ave - zt) / ave;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < kErrTol) break;
  }
  const double e2 = dx * dy - dz * dz;
  const double e3 = dx * dy * dz;
  return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(ave);
}

/// Carlson's symmetric integral R_J(x, y, z, p) for p > 0.
inline double carlson_rj(double x, double y, double z, double p) {
  constexpr double kErrTol = 0.0005;
  if (std::min({x, y, z}) < 0.0 || std::min({x + y, x + z, y + z}) == 0.0 || !(p > 0.0))
    throw DomainError("carlson_rj: invalid arguments");
  double xt = x, yt = y, zt = z, pt = p;
  double sum = 0.0, fac = 1.0;
  double ave = 0.0, dx = 0.0, dy = 0.0, dz = 0.0, dp = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
    const double alamb = sx * (sy + sz) + sy * sz;
    const double alpha = std::pow(pt * (sx + sy + sz) + sx * sy * sz, 2);
    const double beta = pt * (pt + alamb) * (pt + alamb);
    sum += fac * detail::carlson_rc(alpha, beta);
    fac *= 0.25;
    xt = 0.25 * (xt + alamb);
    yt = 0.25 * (yt + alamb);
    zt = 0.25 * (zt + alamb);
    pt = 0.25 * (pt + alamb);
    ave = 0.2 * (xt + yt + zt + pt + pt);
    dx = (ave - xt) / ave;
    dy = (ave - yt) / ave;
    dz = (ave - zt) / ave;
    dp = (ave - pt) / ave;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz), std::abs(dp)}) < kErrTol) break;
  }
  constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 3.0, c3 = 3.0 / 22.0, c4 = 3.0 / 26.0,
                   c5 = 0.75 * c3, c6 = 1.5 * c4, c7 = 0.5 * c2, c8 = c3 + c3;
  const double ea = dx * (dy + dz) + dy * dz;
  const double eb = dx * dy * dz;
  const double ec = dp * dp;
  const double ed = ea - 3.0 * ec;
  const double ee = eb + 2.0 * dp * (ea - ec);
  const double ans =
      3.0 * sum +
      fac * (1.0 + ed * (-c1 + c5 * ed - c6 * ee) + eb * (c7 + dp * (-c8 + dp * c4)) +
             dp * ea * (c2 - dp * c3) - c2 * dp * ec) /
          (ave * std::sqrt(ave));
  return ans;
}

/// Complete elliptic integral of the first kind, by the arithmetic-geometric mean.
inline double complete_K(double m) {
  if (!(m >= 0.0 && m < 1.0)) throw DomainError("complete_K: parameter m=" + detail::num(m) + " outside [0,1)");
  double a = 1.0, g = std::sqrt(1.0 - m);
  for (int i = 0; i < 64 && std::abs(a - g) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return std::numbers::pi / (a + g);
}

/// Complete elliptic integral of the second kind, E(1) = 1.
inline double complete_E(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("complete_E: parameter m=" + detail::num(m) + " outside [0,1]");
  if (m == 1.0) return 1.0;
  // E/K = 1 - sum_{n>=0} 2^{n-1} c_n^2 along the AGM sequence, c_0^2 = m.
  double a = 1.0, g = std::sqrt(1.0 - m);
  double sum = 0.5 * m;
  double weight = 0.5;
  for (int i = 0; i < 64; ++i) {
    const double c = 0.5 * (a - g);
    weight *= 2.0;
    sum += weight * c * c;
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
    // Later terms are O(c^4) and only add amplified rounding noise.
    if (std::abs(c) <= 1e-10 * a) break;
  }
  return std::numbers::pi / (2.0 * a) * (1.0 - sum);
}

/// Complete elliptic integral of the third kind Pi(n | m) with characteristic n < 1.
///
/// Pi(n|m) = int_0^{pi/2} dt / ((1 - n sin^2 t) sqrt(1 - m sin^2 t)), evaluated as
/// R_F(0, 1-m, 1) + (n/3) R_J(0, 1-m, 1, 1-n). Negative n is supported.
inline double complete_Pi(double n, double m) {
  if (!(n < 1.0)) throw DomainError("complete_Pi: characteristic n=" + detail::num(n) + " must be < 1");
  if (!(m >= 0.0 && m < 1.0)) throw DomainError("complete_Pi: parameter m=" + detail::num(m) + " outside [0,1)");
  if (n == 0.0) return complete_K(m);
  const double y = 1.0 - m;
  return carlson_rf(0.0, y, 1.0) + n / 3.0 * carlson_rj(0.0, y, 1.0, 1.0 - n);
}

struct JacobiValues {
  double cn, dn, sn;
};

/// Jacobi elliptic functions (cn, dn, sn)(u | m) by descending Landen/AGM.
inline JacobiValues jacobi_cn_dn_sn(double u, double m) {
  if (!(m >= 0.0 && m < 1.0)) throw DomainError("jacobi_cn_dn_sn: parameter m=" + detail::num(m) + " outside [0,1)");
  if (!std::isfinite(u)) throw DomainError("jacobi_cn_dn_sn: argument must be finite");
  constexpr double kAgmTol = 1e-9;
  std::array<double, 16> em{}, en{};
  double emc = 1.0 - m;
  double a = 1.0, c = 1.0;
  double dn = 1.0;
  int last = 0;
  for (int i = 0; i < 16; ++i) {
    last = i;
    em[i] = a;
    emc = std::sqrt(emc);
    en[i] = emc;
    c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= kAgmTol * a) break;
    emc *= a;
    a = c;
  }
  u *= c;
  double sn = std::sin(u);
  double cn = std::cos(u);
  if (sn != 0.0) {
    a = cn / sn;
    c *= a;
    for (int i = last; i >= 0; --i) {
      const double b = em[i];
      a *= c;
      c *= dn;
      dn = (en[i] + a) / (b + a);
      a = c / b;
    }
    a = 1.0 / std::sqrt(c * c + 1.0);
    sn = (sn >= 0.0) ? a : -a;
    cn = c * sn;
  }
  return {cn, dn, sn};
}

}  // namespace conformal
