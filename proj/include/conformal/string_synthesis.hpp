#pragma once

// The symmetrical configuration gamma_q of a conformal string, its null lift in
// the light cone, and the constant-curvature rhumb lines on the tori T_r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "conformal/critical_curves.hpp"
#include "conformal/errors.hpp"
#include "conformal/mobius.hpp"
#include "conformal/moduli.hpp"
#include "conformal/period_map.hpp"
#include "conformal/quadrature.hpp"

namespace conformal {

struct PhasePair {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct CurveMeta {
  std::optional<Parameters> params;
  std::optional<Modulus> modulus;
  double omega = 0.0;
  std::size_t samples_per_period = 0;
  std::size_t periods = 0;
  std::size_t fundamental_domain = 0;  ///< samples with t in [0, omega)
  bool closed = false;                 ///< the last sample connects back to the first
};

/// Samples of a space curve at strictly increasing times.
struct CurveSamples {
  std::vector<double> ts;
  std::vector<Point3> points;
  CurveMeta meta;

  std::size_t size() const { return points.size(); }
};

/// Per-parameter data shared by every evaluation along one critical curve.
struct StringModel {
  Parameters params;
  SpectralConstants sc;
  double omega;
  double dtheta1;  ///< Theta1(t + omega) - Theta1(t)
  double dtheta2;  ///< Theta2(t + omega) - Theta2(t)
};

inline StringModel make_string_model(const Parameters& p) {
  if (!p.in_sigma()) throw DomainError("string model requires (a, b) in Sigma");
  const auto phi = phi_closed(p);
  return {p, spectral_constants(p), wavelength_omega(p), -2.0 * std::numbers::pi * phi.phi1,
          -2.0 * std::numbers::pi * phi.phi2};
}

namespace detail {

constexpr double kPhaseTol = 1e-15;
constexpr double kPhaseRelTol = 1e-13;

inline PhasePair phase_increment(const StringModel& s, double t0, double t1) {
  const double mu2 = s.sc.mu * s.sc.mu, nu2 = s.sc.nu * s.sc.nu;
  const double d1 = integrate_adaptive(
      [&](double u) {
        const double k = curvature_k(s.params, u);
        return s.sc.mu / (mu2 - k * k);
      },
      t0, t1, kPhaseTol, kPhaseRelTol);
  const double d2 = integrate_adaptive(
      [&](double u) {
        const double k = curvature_k(s.params, u);
        return s.sc.nu / (nu2 - k * k);
      },
      t0, t1, kPhaseTol, kPhaseRelTol);
  return {d1, d2};
}

/// The three radicals sqrt(mu^2 - nu^2) k, nu sqrt(mu^2 - k^2), mu sqrt(k^2 - nu^2).
struct Radicals {
  double A, B, C;
};

inline Radicals radicals(const StringModel& s, double t) {
  const double k = curvature_k(s.params, t);
  const double mu2 = s.sc.mu * s.sc.mu, nu2 = s.sc.nu * s.sc.nu;
  return {std::sqrt(mu2 - nu2) * k, s.sc.nu * std::sqrt(std::max(0.0, mu2 - k * k)),
          s.sc.mu * std::sqrt(std::max(0.0, k * k - nu2))};
}

inline LightConeVector lift_from(const Radicals& r, const PhasePair& th) {
  const double h = 1.0 / std::numbers::sqrt2;
  const double c1 = std::cos(th.theta1), s1 = std::sin(th.theta1);
  const double c2 = std::cos(th.theta2), s2 = std::sin(th.theta2);
  LightConeVector v;
  v << h * (r.A - r.B * c1), r.C * c2, r.C * s2, r.B * s1, h * (r.A + r.B * c1);
  return v;
}

inline Point3 point_from(const Radicals& r, const PhasePair& th) {
  const double radial = r.A + r.B * std::cos(th.theta1);
  if (!(std::abs(radial) >= 1e-12))
    throw SingularSampleError("string sample at the projection pole: |r(t)| < 1e-12");
  const double f = std::numbers::sqrt2 / radial;
  return {f * r.C * std::cos(th.theta2), f * r.C * std::sin(th.theta2), f * r.B * std::sin(th.theta1)};
}

}  // namespace detail

/// Theta1(t), Theta2(t); whole periods are added exactly rather than integrated.
inline PhasePair theta_phases(const StringModel& s, double t) {
  const double periods = std::floor(t / s.omega);
  const double tau = t - periods * s.omega;
  const auto part = detail::phase_increment(s, 0.0, tau);
  return {periods * s.dtheta1 + part.theta1, periods * s.dtheta2 + part.theta2};
}

inline PhasePair theta_phases(const Parameters& p, double t) { return theta_phases(make_string_model(p), t); }

/// r(t) = sqrt(mu^2 - nu^2) k + nu sqrt(mu^2 - k^2) cos Theta1.
inline double radial_r(const Parameters& p, double t) {
  const auto s = make_string_model(p);
  const auto r = detail::radicals(s, t);
  return r.A + r.B * std::cos(theta_phases(s, t).theta1);
}

/// r*(t) = sqrt(mu^2 - nu^2) k + mu sqrt(k^2 - nu^2) cos Theta2, the radial factor of Psi o gamma_q.
inline double radial_r_star(const Parameters& p, double t) {
  const auto s = make_string_model(p);
  const auto r = detail::radicals(s, t);
  return r.A + r.C * std::cos(theta_phases(s, t).theta2);
}

/// Null lift of gamma_q in the positive light cone.
inline LightConeVector null_lift(const Parameters& p, double t) {
  const auto s = make_string_model(p);
  return detail::lift_from(detail::radicals(s, t), theta_phases(s, t));
}

inline Point3 gamma_at(const StringModel& s, double t) {
  return detail::point_from(detail::radicals(s, t), theta_phases(s, t));
}

/// The curve gamma_q evaluated with given (a, b).
inline Point3 gamma_at(const Parameters& p, double t) { return gamma_at(make_string_model(p), t); }

/// Parametrization of Psi o gamma_q.
inline Point3 gamma_star(const Parameters& p, double t) {
  const auto s = make_string_model(p);
  const auto r = detail::radicals(s, t);
  const auto th = theta_phases(s, t);
  const double f = std::numbers::sqrt2 / (r.A + r.C * std::cos(th.theta2));
  return {f * r.B * std::cos(th.theta1), f * r.B * std::sin(th.theta1), f * r.C * std::sin(th.theta2)};
}

/// Process-wide cache used by the modulus-level entry points.
inline InversionCache& default_inversion_cache() {
  static InversionCache cache;
  return cache;
}

inline Parameters parameters_for(const Modulus& q) {
  const auto c = invert_cached(q, default_inversion_cache());
  return Parameters(c.a, c.b);
}

inline Point3 gamma_q(const Modulus& q, double t) { return gamma_at(parameters_for(q), t); }

/// Uniform samples of gamma over `periods` wavelengths, `samples_per_period` per wavelength.
///
/// The phases are integrated once over the fundamental domain and shifted by the exact
/// per-period increments afterwards.
inline CurveSamples sample_critical_curve(const Parameters& p, std::size_t samples_per_period,
                                          std::size_t periods) {
  if (samples_per_period < 4) throw DomainError("sample_critical_curve: need at least 4 samples per period");
  if (periods < 1) throw DomainError("sample_critical_curve: need at least one period");
  const auto s = make_string_model(p);
  const double dt = s.omega / static_cast<double>(samples_per_period);

  std::vector<PhasePair> phase(samples_per_period);
  std::vector<detail::Radicals> rad(samples_per_period);
  PhasePair acc{};
  for (std::size_t i = 0; i < samples_per_period; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (i > 0) {
      const auto inc = detail::phase_increment(s, static_cast<double>(i - 1) * dt, t);
      acc.theta1 += inc.theta1;
      acc.theta2 += inc.theta2;
    }
    phase[i] = acc;
    rad[i] = detail::radicals(s, t);
  }

  CurveSamples out;
  out.ts.reserve(samples_per_period * periods);
  out.points.reserve(samples_per_period * periods);
  for (std::size_t j = 0; j < periods; ++j) {
    const double shift1 = static_cast<double>(j) * s.dtheta1, shift2 = static_cast<double>(j) * s.dtheta2;
    for (std::size_t i = 0; i < samples_per_period; ++i) {
      out.ts.push_back((static_cast<double>(j * samples_per_period + i)) * dt);
      out.points.push_back(detail::point_from(rad[i], {phase[i].theta1 + shift1, phase[i].theta2 + shift2}));
    }
  }
  out.meta.params = p;
  out.meta.omega = s.omega;
  out.meta.samples_per_period = samples_per_period;
  out.meta.periods = periods;
  out.meta.fundamental_domain = samples_per_period;
  return out;
}

/// n * samples_per_period points of gamma_q over [0, n omega), n the symmetry order by default.
inline CurveSamples sample_string(const Modulus& q, const Parameters& p, std::size_t samples_per_period = 2048,
                                  std::size_t periods = 0) {
  const auto n = static_cast<std::size_t>(q.order());
  if (periods == 0) periods = n;
  auto out = sample_critical_curve(p, samples_per_period, periods);
  out.meta.modulus = q;
  out.meta.closed = periods % n == 0;
  return out;
}

inline CurveSamples sample_string(const Modulus& q, std::size_t samples_per_period = 2048, std::size_t periods = 0) {
  return sample_string(q, parameters_for(q), samples_per_period, periods);
}

/// The momentum matrix of the critical curve with parameters (a, b).
inline MobiusMatrix momentum_matrix(const Parameters& p) {
  const double ra = std::sqrt(p.a()), hb = 0.5 * p.b();
  MobiusMatrix X;
  X << 0, 0, 1, 0, 0,
       1, 0, 0, ra, 0,
       -hb, 0, 0, 0, 1,
       0, -ra, 0, 0, 0,
       0, 1, -hb, 0, 0;
  return X;
}

namespace detail {

inline void check_rhumb(double r, double m, double n) {
  if (!(r > 0.0 && r < std::numbers::sqrt2)) throw DomainError("torus rhumb line: need 0 < r < sqrt2");
  if (m * n == 0.0 || n == m || n == -m) throw DomainError("torus rhumb line: need mn != 0 and n != +-m");
}

}  // namespace detail

/// Rhumb line alpha_{r,m,n}(t) of the torus T_r, at angles (theta, phi) = (n t, m t).
inline Point3 torus_rhumb(double r, double m, double n, double t) {
  detail::check_rhumb(r, m, n);
  const double theta = n * t, phi = m * t;
  const double r2 = r * r;
  const double den = 2.0 + r2 + (2.0 - r2) * std::cos(phi);
  return {4.0 * r * std::cos(theta) / den, 4.0 * r * std::sin(theta) / den,
          std::numbers::sqrt2 * (r2 - 2.0) * std::sin(phi) / den};
}

struct ConformalCurvatures {
  double k1, k2;
};

/// Constant conformal curvatures of alpha_{r,m,n}.
inline ConformalCurvatures rhumb_curvatures(double r, double m, double n) {
  detail::check_rhumb(r, m, n);
  const double r2 = r * r, m2 = m * m, n2 = n * n;
  const double k1 = -(2.0 + r2) * m * n /
                    std::pow(8.0 * m2 * n2 * (m2 - n2) * (m2 - n2) * r2 * (2.0 - r2) * (2.0 - r2), 0.25);
  const double k2 = (8.0 * n2 * n2 * r2 + m2 * m2 * (r2 - 2.0) * (r2 - 2.0)) /
                    (4.0 * std::numbers::sqrt2 * r * std::abs(m * n * (m2 - n2)) * (r2 - 2.0));
  return {k1, k2};
}

/// Torus radius for which alpha_{r,q,1} is a closed critical curve.
inline double r_of_q(double q) {
  if (!(q > 0.0) || q == 1.0) throw DomainError("r_of_q: need q > 0 and q != 1");
  return std::numbers::sqrt2 / q * std::sqrt(2.0 + q * q - 2.0 * std::sqrt(1.0 + q * q));
}

inline double r_of_q(const Rational& q) { return r_of_q(q.value()); }

/// alpha_{r(q), q, 1} with q = m/n over [0, 2 pi n), a torus knot of type (m, n).
inline CurveSamples sample_torus_knot(Int m, Int n, std::size_t samples) {
  if (m < 1 || n < 1) throw DomainError("torus knot: m and n must be positive");
  const Rational q(m, n);
  if (q.num() == q.den()) throw DomainError("torus knot: q = m/n must differ from 1");
  if (samples < 8) throw DomainError("torus knot: need at least 8 samples");
  const double r = r_of_q(q);
  const double qv = q.value();
  const double span = 2.0 * std::numbers::pi * static_cast<double>(q.den());
  CurveSamples out;
  out.ts.reserve(samples);
  out.points.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = span * static_cast<double>(i) / static_cast<double>(samples);
    out.ts.push_back(t);
    out.points.push_back(torus_rhumb(r, qv, 1.0, t));
  }
  out.meta.omega = span;
  out.meta.samples_per_period = samples;
  out.meta.periods = 1;
  out.meta.fundamental_domain = samples;
  out.meta.closed = true;
  return out;
}

}  // namespace conformal
