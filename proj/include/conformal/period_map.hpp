#pragma once

// The period map Phi: Sigma -> Omega~ and its inverse.
//
// Phi(a, b) = (1/2pi) int_0^omega (mu/(k^2 - mu^2), nu/(k^2 - nu^2)) dt, with the
// closed form in terms of complete integrals of the third kind.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "conformal/critical_curves.hpp"
#include "conformal/errors.hpp"
#include "conformal/moduli.hpp"
#include "conformal/quadrature.hpp"
#include "conformal/special_functions.hpp"

namespace conformal {

struct PeriodValue {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

enum class PartialsSource { analytic, finite_difference };

struct PeriodJacobian {
  double da_phi1 = 0.0;
  double db_phi1 = 0.0;
  double da_phi2 = 0.0;
  double db_phi2 = 0.0;
  double det = 0.0;
  PartialsSource source = PartialsSource::analytic;
  double gate_error = 0.0;  ///< largest relative deviation from finite differences (0 if ungated)
};

using Vec2 = std::array<double, 2>;

namespace detail {

inline void require_sigma(const Parameters& p, const char* who) {
  if (!p.in_sigma())
    throw DomainError(std::string(who) + ": (a, b) = (" + detail::num(p.a()) + ", " +
                      detail::num(p.b()) + ") is outside Sigma (need ab > 1)");
}

inline PeriodJacobian with_det(PeriodJacobian j) {
  j.det = j.da_phi1 * j.db_phi2 - j.db_phi1 * j.da_phi2;
  return j;
}

/// Pi(n|m) and its two partial derivatives.
struct PiJet {
  double value, dn, dm;
};

/// Double power series around n = m = 0; used when both are small.
inline PiJet pi_jet_series(double n, double m) {
  // Pi = (pi/2) sum_{j,k} n^j m^k (1/2)_k/k! (1/2)_{j+k}/(j+k)!
  constexpr int kOrder = 48;
  std::array<double, kOrder + 1> poch{}, np{}, mp{};  // (1/2)_i / i!, n^i, m^i
  poch[0] = np[0] = mp[0] = 1.0;
  for (int i = 1; i <= kOrder; ++i) {
    poch[i] = poch[i - 1] * (i - 0.5) / i;
    np[i] = np[i - 1] * n;
    mp[i] = mp[i - 1] * m;
  }
  double value = 0.0, dn = 0.0, dm = 0.0;
  for (int j = 0; j <= kOrder; ++j) {
    for (int k = 0; j + k <= kOrder; ++k) {
      const double c = poch[k] * poch[j + k];
      value += c * np[j] * mp[k];
      if (j > 0) dn += c * j * np[j - 1] * mp[k];
      if (k > 0) dm += c * k * np[j] * mp[k - 1];
    }
  }
  constexpr double half_pi = 0.5 * std::numbers::pi;
  return {half_pi * value, half_pi * dn, half_pi * dm};
}

inline PiJet pi_jet(double n, double m) {
  if (std::max(std::abs(n), std::abs(m)) < 0.08) return pi_jet_series(n, m);
  const double K = complete_K(m), E = complete_E(m), Pi = complete_Pi(n, m);
  const double dn = (n * E + (m - n) * K + (n * n - m) * Pi) / (2.0 * (m - n) * (n - 1.0) * n);
  const double dm = E / (2.0 * (m - 1.0) * (n - m)) + Pi / (2.0 * (n - m));
  return {Pi, dn, dm};
}

/// Partial derivatives (d/da, d/db) of s/(pi sqrt(a)(a - s^2)) Pi((a-b)/(a-s^2), (a-b)/a)
/// given s^2 and its gradient.
inline std::pair<double, double> component_gradient(double a, double b, double s2, double s2_a,
                                                    double s2_b) {
  const double d = a - s2;
  const double n = (a - b) / d;
  const double m = (a - b) / a;
  const double coeff = std::sqrt(s2) / (std::numbers::pi * std::sqrt(a) * d);
  const PiJet pi = pi_jet(n, m);

  auto directional = [&](double da, double db, double ds2) {
    const double dlog_coeff = 0.5 * ds2 / s2 - 0.5 * da / a - (da - ds2) / d;
    const double dn = ((da - db) * d - (a - b) * (da - ds2)) / (d * d);
    const double dm = (da * b - db * a) / (a * a);
    return coeff * (pi.value * dlog_coeff + pi.dn * dn + pi.dm * dm);
  };
  return {directional(1.0, 0.0, s2_a), directional(0.0, 1.0, s2_b)};
}

/// Chain-rule partials for a >= b, ab > 1 (the diagonal a = b is allowed).
inline PeriodJacobian analytic_partials(double a, double b) {
  const double zeta = std::sqrt(4.0 + (a - b) * (a - b));
  const double mu2 = 0.5 * (a + b + zeta);
  const double nu2 = 0.5 * (a + b - zeta);
  const double r = (a - b) / zeta;
  const auto [p1a, p1b] = component_gradient(a, b, mu2, 0.5 * (1.0 + r), 0.5 * (1.0 - r));
  const auto [p2a, p2b] = component_gradient(a, b, nu2, 0.5 * (1.0 - r), 0.5 * (1.0 + r));
  return with_det({p1a, p1b, p2a, p2b, 0.0, PartialsSource::analytic, 0.0});
}

inline std::atomic<long>& fallback_counter() {
  static std::atomic<long> count{0};
  return count;
}

}  // namespace detail

/// Phi by adaptive quadrature over one wavelength; `tol` bounds the absolute error of each component.
inline PeriodValue phi_quadrature(const Parameters& p, double tol = 1e-11) {
  detail::require_sigma(p, "phi_quadrature");
  const auto sc = spectral_constants(p);
  const double omega = wavelength_omega(p);
  const double mu2 = sc.mu * sc.mu, nu2 = sc.nu * sc.nu;
  const double scale = 2.0 * std::numbers::pi;
  const double i1 = integrate_adaptive(
      [&](double t) {
        const double k = curvature_k(p, t);
        return sc.mu / (k * k - mu2);
      },
      0.0, omega, tol * scale);
  const double i2 = integrate_adaptive(
      [&](double t) {
        const double k = curvature_k(p, t);
        return sc.nu / (k * k - nu2);
      },
      0.0, omega, tol * scale);
  return {i1 / scale, i2 / scale};
}

inline PeriodValue phi_closed(const Parameters& p) {
  detail::require_sigma(p, "phi_closed");
  const double a = p.a(), b = p.b();
  const auto sc = spectral_constants(p);
  const double mu2 = sc.mu * sc.mu, nu2 = sc.nu * sc.nu;
  const double m = (a - b) / a;
  const double root_a = std::sqrt(a);
  const double phi1 = sc.mu / (std::numbers::pi * root_a * (a - mu2)) * complete_Pi((a - b) / (a - mu2), m);
  const double phi2 = sc.nu / (std::numbers::pi * root_a * (a - nu2)) * complete_Pi((a - b) / (a - nu2), m);
  return {phi1, phi2};
}

/// Restriction of Phi to the diagonal a = b.
inline PeriodValue phi_boundary_plus(double a) {
  if (!(a >= 1.0)) throw DomainError("phi_boundary_plus: need a >= 1");
  return {-0.5 * std::sqrt((a + 1.0) / a), 0.5 * std::sqrt((a - 1.0) / a)};
}

/// Restriction of Phi to the hyperbola ab = 1.
inline PeriodValue phi_boundary_minus(double a) {
  if (!(a >= 1.0)) throw DomainError("phi_boundary_minus: need a >= 1");
  const double a2 = a * a;
  return {-std::sqrt(1.0 + a2) / std::numbers::pi * complete_Pi(1.0 - a2, (a2 - 1.0) / a2), 0.0};
}

/// Analytic partials on the diagonal, where Parameters cannot be formed.
inline PeriodJacobian phi_partials_diagonal(double a) {
  if (!(a > 1.0)) throw DomainError("phi_partials_diagonal: need a > 1");
  return detail::analytic_partials(a, a);
}

/// Central finite differences of phi_quadrature with base step h = 1e-5 max(1, |a|, |b|),
/// shrunk when a stencil point would leave Sigma. Steps h and h/2 are combined by one
/// Richardson extrapolation, which keeps the truncation error small where Phi2 bends
/// sharply near ab = 1.
inline PeriodJacobian phi_partials_fd(const Parameters& p, double quad_tol = 1e-13) {
  detail::require_sigma(p, "phi_partials_fd");
  const double a = p.a(), b = p.b();
  double h = 1e-5 * std::max({1.0, std::abs(a), std::abs(b)});
  auto stencil_ok = [&](double step) {
    return (a - step) * (b - step) > 1.0 && a - step > b + step && (a - step) * b > 1.0 && a * (b - step) > 1.0;
  };
  while (!stencil_ok(h)) {
    h *= 0.5;
    if (h < 1e-12) throw DomainError("phi_partials_fd: point too close to the boundary of Sigma");
  }
  auto central = [&](double step) {
    const auto pa = phi_quadrature({a + step, b}, quad_tol), ma = phi_quadrature({a - step, b}, quad_tol);
    const auto pb = phi_quadrature({a, b + step}, quad_tol), mb = phi_quadrature({a, b - step}, quad_tol);
    const double inv = 0.5 / step;
    return std::array<double, 4>{(pa.phi1 - ma.phi1) * inv, (pb.phi1 - mb.phi1) * inv,
                                 (pa.phi2 - ma.phi2) * inv, (pb.phi2 - mb.phi2) * inv};
  };
  const auto coarse = central(h), fine = central(0.5 * h);
  std::array<double, 4> d{};
  for (std::size_t i = 0; i < 4; ++i) d[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return detail::with_det({d[0], d[1], d[2], d[3], 0.0, PartialsSource::finite_difference, 0.0});
}

/// Number of times phi_partials has fallen back to finite differences in this process.
inline long partials_fallback_count() { return detail::fallback_counter().load(); }

inline double relative_deviation(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

/// Partials of Phi. The analytic values are checked against phi_partials_fd; if any of the four
/// differs by more than `gate` (relative), the finite-difference values are returned instead.
inline PeriodJacobian phi_partials(const Parameters& p, double gate = 1e-4) {
  detail::require_sigma(p, "phi_partials");
  auto analytic = detail::analytic_partials(p.a(), p.b());
  const auto fd = phi_partials_fd(p);
  const double err = std::max({relative_deviation(analytic.da_phi1, fd.da_phi1),
                               relative_deviation(analytic.db_phi1, fd.db_phi1),
                               relative_deviation(analytic.da_phi2, fd.da_phi2),
                               relative_deviation(analytic.db_phi2, fd.db_phi2)});
  const bool finite = std::isfinite(analytic.det);
  if (!finite || !(err <= gate)) {
    ++detail::fallback_counter();
    auto out = fd;
    out.gate_error = finite ? err : INFINITY;
    return out;
  }
  analytic.gate_error = err;
  return analytic;
}

/// Analytic partials without the finite-difference gate.
inline PeriodJacobian phi_partials_unchecked(const Parameters& p) {
  detail::require_sigma(p, "phi_partials_unchecked");
  return detail::analytic_partials(p.a(), p.b());
}

inline double phi_jacobian(const Parameters& p) { return phi_partials(p).det; }

/// E(m)(-2aE(m) + (a+b)K(m)) / (2 pi^2 a (a-b) b sqrt(zeta^2 (ab-1))), m = (a-b)/a.
inline double jacobian_closed_form(const Parameters& p) {
  detail::require_sigma(p, "jacobian_closed_form");
  const double a = p.a(), b = p.b(), m = (a - b) / a;
  const double E = complete_E(m), K = complete_K(m);
  const double zeta2 = 4.0 + (a - b) * (a - b);
  return E * (-2.0 * a * E + (a + b) * K) /
         (2.0 * std::numbers::pi * std::numbers::pi * a * (a - b) * b * std::sqrt(zeta2 * (a * b - 1.0)));
}

/// Rational coefficient blocks for the four partials, with E and K both taken at m = (a-b)/a.
struct TranscribedPartials {
  std::array<double, 4> values{};  ///< da_phi1, db_phi1, da_phi2, db_phi2
  std::array<bool, 4> trusted{};   ///< block agrees with finite differences to the gate
  std::array<double, 4> deviation{};
};

inline TranscribedPartials transcribed_partials(const Parameters& p, double gate = 1e-4) {
  detail::require_sigma(p, "transcribed_partials");
  const double a = p.a(), b = p.b();
  const double z = std::sqrt(4.0 + (a - b) * (a - b));
  const double s2 = std::numbers::sqrt2, pi = std::numbers::pi;
  const double m = (a - b) / a;
  const double E = complete_E(m), K = complete_K(m);

  const double x11 = s2 * (2 * z - a * a * b + a * (4 + z * b) + b * (4 + z * b));
  const double y11 = -2 * s2 * (a + z - a * b * b + b * (3 + b * (z + b)));
  const double z11 = pi * std::sqrt(a) * z * (a - b) * (a - b - z) * std::pow(a + b + z, 1.5);
  const double x21 = a * (2 * b + z);
  const double y21 = -b * (a + b + z);
  const double z21 = s2 * pi * b * (a - b) * z * std::sqrt(a * (a + b + z));
  const double x12 = s2 * (2 * z + a * a * b + a * (-4 + b * z) - b * (4 - b * z + b * b));
  const double y12 = 2 * s2 * (a - z - a * b * b + b * (3 - b * z + b * b));
  const double z12 = pi * std::sqrt(a) * z * (a - b) * (a - b + z) * std::pow(a + b - z, 1.5);
  const double x22 = a * (z - 2 * b);
  const double y22 = b * (a + b - z);
  const double z22 = s2 * pi * (a - b) * b * z * std::sqrt(a * (a + b - z));

  TranscribedPartials out;
  out.values = {(x11 * E + y11 * K) / z11, (x21 * E + y21 * K) / z21, (x12 * E + y12 * K) / z12,
                (x22 * E + y22 * K) / z22};
  const auto fd = phi_partials_fd(p);
  const std::array<double, 4> ref = {fd.da_phi1, fd.db_phi1, fd.da_phi2, fd.db_phi2};
  for (std::size_t i = 0; i < 4; ++i) {
    out.deviation[i] = std::isfinite(out.values[i]) ? relative_deviation(out.values[i], ref[i]) : INFINITY;
    out.trusted[i] = out.deviation[i] <= gate;
  }
  return out;
}

/// Directions tangent to the level curves of Phi1 and Phi2.
inline std::pair<Vec2, Vec2> level_fields(const Parameters& p) {
  const auto j = phi_partials(p);
  return {Vec2{1.0, -j.da_phi1 / j.db_phi1}, Vec2{1.0, -j.da_phi2 / j.db_phi2}};
}

struct InversionResult {
  Parameters params;
  double residual;  ///< max-norm of Phi(a, b) - (-q1, q2)
  int iterations;
};

struct NewtonOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
  double polish = 1e-14;
  double barrier = 1e-9;
};

namespace detail {

inline bool inside_sigma(double a, double b, double margin) {
  return a > 0.0 && a - b > margin && a * b - 1.0 > margin;
}

/// a with Phi_-(a)_1 = -q1, by bisection.
inline double boundary_minus_preimage(double q1) {
  double lo = 1.0, hi = 2.0;
  while (phi_boundary_minus(hi).phi1 < -q1) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw ConvergenceError("invert_period_map: cannot bracket the lower boundary preimage");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi_boundary_minus(mid).phi1 < -q1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Starting point on the segment joining the boundary preimages of the abscissa -q1.
inline std::pair<double, double> inversion_seed(double q1, double q2) {
  const double a_plus = 1.0 / (4.0 * q1 * q1 - 1.0);
  const double a_minus = detail::boundary_minus_preimage(q1);
  const double lambda = q2 / phi_boundary_plus(a_plus).phi2;
  const double a = a_minus + lambda * (a_plus - a_minus);
  const double b = 1.0 / a_minus + lambda * (a_plus - 1.0 / a_minus);
  return {a, b};
}

inline InversionResult invert_period_map_detailed(const Modulus& q, const NewtonOptions& opt = {}) {
  const double q1 = q.q1().value(), q2 = q.q2().value();
  auto [a, b] = inversion_seed(q1, q2);
  if (!detail::inside_sigma(a, b, opt.barrier)) {
    b = std::max(b, 1.0 / a + 2.0 * opt.barrier);
    b = std::min(b, a - 2.0 * opt.barrier);
  }

  auto residual_at = [&](double x, double y) {
    const auto v = phi_closed({x, y});
    return Vec2{v.phi1 + q1, v.phi2 - q2};
  };
  auto norm = [](const Vec2& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

  Vec2 r = residual_at(a, b);
  int it = 0;
  for (; it < opt.max_iterations && norm(r) > opt.polish; ++it) {
    const auto j = phi_partials({a, b});
    const double da = -(j.db_phi2 * r[0] - j.db_phi1 * r[1]) / j.det;
    const double db = -(-j.da_phi2 * r[0] + j.da_phi1 * r[1]) / j.det;
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const double na = a + t * da, nb = b + t * db;
      if (!detail::inside_sigma(na, nb, opt.barrier)) continue;
      const Vec2 nr = residual_at(na, nb);
      if (norm(nr) < norm(r)) {
        a = na;
        b = nb;
        r = nr;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(norm(r) <= opt.tolerance))
    throw ConvergenceError("invert_period_map: residual " + detail::num(norm(r)) + " after " +
                           std::to_string(it) + " iterations for modulus " + q.str());
  return {Parameters(a, b), norm(r), it};
}

/// The unique (a, b) in Sigma with Phi(a, b) = (-q1, q2).
inline Parameters invert_period_map(const Modulus& q) { return invert_period_map_detailed(q).params; }

/// Cache key "l1/n,l2/n" with the common symmetry order as denominator.
inline std::string cache_key(const Modulus& q) {
  const auto qn = quantum_from_modulus(q);
  const std::string n = std::to_string(qn.n);
  return std::to_string(qn.l1) + "/" + n + "," + std::to_string(qn.l2) + "/" + n;
}

struct CachedInversion {
  double a, b, omega, residual;
  friend bool operator==(const CachedInversion&, const CachedInversion&) = default;
};

/// Concurrent map from moduli to inversion results; writes are idempotent.
class InversionCache {
 public:
  std::optional<CachedInversion> find(const std::string& key) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& key, const CachedInversion& value) {
    std::unique_lock lock(mutex_);
    entries_[key] = value;
  }

  std::map<std::string, CachedInversion> snapshot() const {
    std::shared_lock lock(mutex_);
    return entries_;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, CachedInversion> entries_;
};

/// Inversion through the cache; a miss, or a hit above the requested tolerance, recomputes and stores.
inline CachedInversion invert_cached(const Modulus& q, InversionCache& cache, const NewtonOptions& opt = {}) {
  const auto key = cache_key(q);
  if (auto hit = cache.find(key); hit && hit->residual <= opt.tolerance) return *hit;
  const auto r = invert_period_map_detailed(q, opt);
  const CachedInversion value{r.params.a(), r.params.b(), wavelength_omega(r.params), r.residual};
  cache.store(key, value);
  return value;
}

}  // namespace conformal
