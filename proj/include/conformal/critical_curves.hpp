#pragma once

// Quasi-periodic solutions of the Euler-Lagrange equations of the conformal
// arclength functional, labelled by the two roots (a, b) of t^2 - 2 C1 t - C2.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "conformal/errors.hpp"
#include "conformal/special_functions.hpp"

namespace conformal {

/// The pair (a, b) classifying a quasi-periodic critical curve.
///
/// Invariants: a > 0, a > b, b != 0. The integration constants are
/// C1 = (a + b)/2 and C2 = -ab.
class Parameters {
 public:
  Parameters(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b))
      throw DomainError("Parameters: non-finite value");
    if (!(a > 0.0)) throw DomainError("Parameters: a must be positive, got " + detail::num(a));
    if (!(a > b)) throw DomainError("Parameters: need a > b");
    if (b == 0.0) throw DomainError("Parameters: b = 0 is excluded");
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c1() const { return 0.5 * (a_ + b_); }
  double c2() const { return -a_ * b_; }

  /// (a, b) lies in Sigma = { ab > 1 }, where closed curves live.
  bool in_sigma() const { return a_ * b_ > 1.0; }

  /// Elliptic parameter of k: a/(a-b) for b < 0, (a-b)/a for b > 0.
  double elliptic_parameter() const { return b_ < 0.0 ? a_ / (a_ - b_) : (a_ - b_) / a_; }

  friend bool operator==(const Parameters&, const Parameters&) = default;

 private:
  double a_;
  double b_;
};

struct SpectralConstants {
  double mu;
  double nu;
  double zeta;  ///< sqrt(4 + (a-b)^2)
};

/// First conformal curvature k_(a,b)(t).
inline double curvature_k(const Parameters& p, double t) {
  const double a = p.a(), b = p.b();
  if (b < 0.0) return std::sqrt(a) * jacobi_cn_dn_sn(std::sqrt(a - b) * t, a / (a - b)).cn;
  return std::sqrt(a) * jacobi_cn_dn_sn(std::sqrt(a) * t, (a - b) / a).dn;
}

/// d k_(a,b) / dt from cn' = -sn dn and dn' = -m sn cn.
inline double curvature_k_derivative(const Parameters& p, double t) {
  const double a = p.a(), b = p.b();
  if (b < 0.0) {
    const double w = std::sqrt(a - b);
    const auto j = jacobi_cn_dn_sn(w * t, a / (a - b));
    return -std::sqrt(a) * w * j.sn * j.dn;
  }
  const double m = (a - b) / a;
  const auto j = jacobi_cn_dn_sn(std::sqrt(a) * t, m);
  return -a * m * j.sn * j.cn;
}

/// k2 = -(3/2) k^2 + (a+b)/2.
inline double second_curvature(const Parameters& p, double t) {
  const double k = curvature_k(p, t);
  return -1.5 * k * k + p.c1();
}

/// (k')^2 + (k^2 - a)(k^2 - b); vanishes along exact solutions.
inline double el_residual(const Parameters& p, double t) {
  const double k = curvature_k(p, t);
  const double dk = curvature_k_derivative(p, t);
  const double k2 = k * k;
  return dk * dk + (k2 - p.a()) * (k2 - p.b());
}

/// Minimal period of k_(a,b).
///
/// For b > 0 the dn-branch period 2K((a-b)/a)/sqrt(a) is used.
inline double wavelength_omega(const Parameters& p) {
  const double a = p.a(), b = p.b();
  if (b < 0.0) return 4.0 * complete_K(a / (a - b)) / std::sqrt(a - b);
  return 2.0 * complete_K((a - b) / a) / std::sqrt(a);
}

/// mu and nu (the real frequencies of the momentum matrix); requires ab >= 1.
inline SpectralConstants spectral_constants(const Parameters& p) {
  const double a = p.a(), b = p.b();
  if (a * b < 1.0) throw DomainError("spectral_constants: ab < 1, nu would be imaginary");
  const double zeta = std::sqrt(4.0 + (a - b) * (a - b));
  const double nu2 = std::max(0.0, 0.5 * (a + b - zeta));
  return {std::sqrt(0.5 * (a + b + zeta)), std::sqrt(nu2), zeta};
}

struct DomainFlags {
  bool in_S = false;
  bool in_Sigma = false;
  bool in_SigmaPrime = false;
  bool in_OmegaTilde = false;
  bool in_Omega = false;
};

/// Membership of a planar point in the parameter domains S, Sigma, Sigma'
/// (read as (a, b)) and in the moduli domains Omega~, Omega (read as (x, y)).
inline DomainFlags domain_predicates(double x, double y) {
  DomainFlags f;
  f.in_S = x > 0.0 && x > y && y != 0.0;
  f.in_Sigma = f.in_S && x * y > 1.0;
  f.in_SigmaPrime = x > 1.0 && x * y > 1.0 && y <= x;
  const double r2 = x * x + y * y;
  f.in_OmegaTilde = x > -std::numbers::sqrt2 / 2 && x < -0.5 && y > 0.0 && r2 < 0.5;
  f.in_Omega = x > 0.5 && x < std::numbers::sqrt2 / 2 && y > 0.0 && r2 < 0.5;
  return f;
}

}  // namespace conformal
