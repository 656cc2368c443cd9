#pragma once

// Phenomenology of sampled strings: closure, linking numbers with the two
// rotational axes, symmetry orders, Vessiot frames and conformal invariants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "conformal/critical_curves.hpp"
#include "conformal/errors.hpp"
#include "conformal/mobius.hpp"
#include "conformal/moduli.hpp"
#include "conformal/string_synthesis.hpp"

namespace conformal {

enum class LinkingMethod { winding, gauss_double_integral };

struct LinkingReport {
  double lk_axis = 0.0;
  double lk_clifford = 0.0;
  LinkingMethod method = LinkingMethod::winding;
};

/// Number of turns of a polyline about the z-axis, by accumulating atan2(y, x).
///
/// A closed polyline also counts its last-to-first segment.
inline double winding_about_z(const std::vector<Point3>& pts, bool closed) {
  if (pts.size() < 2) throw SamplingError("winding_about_z: need at least two samples");
  auto angle = [](const Point3& p) {
    if (p[0] == 0.0 && p[1] == 0.0) throw SamplingError("winding_about_z: sample on the z-axis");
    return std::atan2(p[1], p[0]);
  };
  double total = 0.0;
  double prev = angle(pts.front());
  const std::size_t count = closed ? pts.size() + 1 : pts.size();
  for (std::size_t i = 1; i < count; ++i) {
    const double cur = angle(pts[i % pts.size()]);
    double d = cur - prev;
    if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    if (std::abs(d) >= 0.5 * std::numbers::pi)
      throw SamplingError("winding_about_z: consecutive samples subtend " + detail::num(std::abs(d)) +
                          " rad about the axis (under-sampled)");
    total += d;
    prev = cur;
  }
  return total / (2.0 * std::numbers::pi);
}

inline double winding_about_z(const CurveSamples& s) { return winding_about_z(s.points, s.meta.closed); }

inline std::vector<Point3> apply_Psi(const std::vector<Point3>& pts) {
  std::vector<Point3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(involution_Psi(p));
  return out;
}

/// lk(gamma, [z]) = -winding about z and lk(gamma, [C]) = winding of Psi o gamma about z.
inline LinkingReport linking_by_winding(const CurveSamples& s) {
  return {-winding_about_z(s.points, s.meta.closed), winding_about_z(apply_Psi(s.points), s.meta.closed),
          LinkingMethod::winding};
}

struct GaussLinking {
  double value = 0.0;
  double min_distance = 0.0;
  bool near_intersection = false;  ///< min pairwise distance below 1e-6
};

namespace detail {

inline Point3 sub(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Point3 cross(const Point3& a, const Point3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

/// Signed solid angle swept by segment pair (p1 p2, p3 p4), over 4 pi.
inline double segment_linking(const Point3& p1, const Point3& p2, const Point3& p3, const Point3& p4) {
  const Point3 r13 = sub(p3, p1), r14 = sub(p4, p1), r23 = sub(p3, p2), r24 = sub(p4, p2);
  std::array<Point3, 4> n = {cross(r13, r14), cross(r14, r24), cross(r24, r23), cross(r23, r13)};
  for (auto& v : n) {
    const double len = norm(v);
    if (len < 1e-300) return 0.0;
    v = {v[0] / len, v[1] / len, v[2] / len};
  }
  auto safe_asin = [](double x) { return std::asin(std::clamp(x, -1.0, 1.0)); };
  const double omega = safe_asin(dot(n[0], n[1])) + safe_asin(dot(n[1], n[2])) + safe_asin(dot(n[2], n[3])) +
                       safe_asin(dot(n[3], n[0]));
  const double orient = dot(cross(sub(p4, p3), sub(p2, p1)), r13);
  return orient > 0.0 ? omega / (4.0 * std::numbers::pi) : -omega / (4.0 * std::numbers::pi);
}

inline std::vector<Point3> thin(const std::vector<Point3>& pts, std::size_t max_points) {
  if (max_points == 0 || pts.size() <= max_points) return pts;
  const std::size_t stride = (pts.size() + max_points - 1) / max_points;
  std::vector<Point3> out;
  for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
  return out;
}

}  // namespace detail

/// Gauss linking integral of two closed polylines.
///
/// Each pair of segments contributes its exact solid-angle term, so the result is the
/// linking number of the polygons themselves. Curves with more than `max_points`
/// vertices are thinned by a uniform stride first.
inline GaussLinking gauss_linking(const std::vector<Point3>& a, const std::vector<Point3>& b,
                                  std::size_t max_points = 1024) {
  const auto A = detail::thin(a, max_points), B = detail::thin(b, max_points);
  if (A.size() < 3 || B.size() < 3) throw SamplingError("gauss_linking: each curve needs at least 3 vertices");
  double sum = 0.0;
  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Point3& p1 = A[i];
    const Point3& p2 = A[(i + 1) % A.size()];
    double row = 0.0;
    for (std::size_t j = 0; j < B.size(); ++j) {
      const Point3& p3 = B[j];
      const Point3& p4 = B[(j + 1) % B.size()];
      const Point3 d = detail::sub(p1, p3);
      min_d2 = std::min(min_d2, detail::dot(d, d));
      row += detail::segment_linking(p1, p2, p3, p4);
    }
    sum += row;
  }
  const double min_d = std::sqrt(min_d2);
  return {sum, min_d, min_d < 1e-6};
}

inline GaussLinking gauss_linking(const CurveSamples& a, const CurveSamples& b, std::size_t max_points = 1024) {
  if (!a.meta.closed || !b.meta.closed) throw SamplingError("gauss_linking: both curves must be closed");
  return gauss_linking(a.points, b.points, max_points);
}

/// The Clifford circle, oriented as beta, with `count` vertices.
inline std::vector<Point3> clifford_circle_polyline(std::size_t count) {
  std::vector<Point3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    out.push_back({std::numbers::sqrt2 * std::cos(phi), std::numbers::sqrt2 * std::sin(phi), 0.0});
  }
  return out;
}

/// Both linking numbers through Gauss integrals against the Clifford circle.
///
/// The z-axis is not compact, so lk(gamma, [z]) is taken as lk(Psi o gamma, Psi[z]); Psi maps the
/// downward z-axis onto the Clifford circle with the orientation opposite to beta.
inline LinkingReport linking_by_gauss(const CurveSamples& s, std::size_t max_points = 1024) {
  if (!s.meta.closed) throw SamplingError("linking_by_gauss: curve must be closed");
  const auto circle = clifford_circle_polyline(max_points);
  const double lk_c = gauss_linking(s.points, circle, max_points).value;
  const double lk_z = -gauss_linking(apply_Psi(s.points), circle, max_points).value;
  return {lk_z, lk_c, LinkingMethod::gauss_double_integral};
}

inline LinkingReport linking_with_axis(const Modulus& q, std::size_t samples_per_period = 2048) {
  return linking_by_winding(sample_string(q, samples_per_period));
}

inline LinkingReport linking_with_clifford(const Modulus& q, std::size_t samples_per_period = 2048) {
  return linking_by_winding(sample_string(q, samples_per_period));
}

/// max ||gamma(t + n omega) - gamma(t)|| over `grid` times in [0, omega).
///
/// The phase increments are integrated period by period from t, without using the
/// closed-form increments, so the residual measures how well Phi(a, b) = (-q1, q2) holds.
inline double closure_residual(const Modulus& q, const Parameters& p, std::size_t grid = 32) {
  const auto s = make_string_model(p);
  const double span = static_cast<double>(q.order()) * s.omega;
  const double mu2 = s.sc.mu * s.sc.mu, nu2 = s.sc.nu * s.sc.nu;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = s.omega * static_cast<double>(i) / static_cast<double>(grid);
    const auto th = theta_phases(s, t);
    double d1 = 0.0, d2 = 0.0;
    for (Int k = 0; k < q.order(); ++k) {
      const double lo = t + static_cast<double>(k) * s.omega, hi = lo + s.omega;
      d1 += integrate_adaptive(
          [&](double u) {
            const double c = curvature_k(s.params, u);
            return s.sc.mu / (mu2 - c * c);
          },
          lo, hi, detail::kPhaseTol, detail::kPhaseRelTol);
      d2 += integrate_adaptive(
          [&](double u) {
            const double c = curvature_k(s.params, u);
            return s.sc.nu / (nu2 - c * c);
          },
          lo, hi, detail::kPhaseTol, detail::kPhaseRelTol);
    }
    const auto here = detail::point_from(detail::radicals(s, t), th);
    const auto there = detail::point_from(detail::radicals(s, t + span), {th.theta1 + d1, th.theta2 + d2});
    worst = std::max(worst, detail::norm(detail::sub(there, here)));
  }
  return worst;
}

inline double closure_residual(const Modulus& q, std::size_t grid = 32) {
  return closure_residual(q, parameters_for(q), grid);
}

/// R(2 pi q2, 2 pi q1), with the angles reduced exactly modulo 2 pi before evaluation.
inline MobiusMatrix monodromy_power(const Modulus& q, Int k) {
  auto angle = [](const Rational& r, Int power) {
    const Int num = static_cast<Int>((static_cast<Wide>(r.num()) * power) % r.den());
    return 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(r.den());
  };
  return rotation_R(angle(q.q2(), k), angle(q.q1(), k));
}

/// Smallest k >= 1 with M^k = I to `tol`, or 0 if none up to max_order.
inline Int matrix_order(const MobiusMatrix& M, Int max_order, double tol = 1e-8) {
  MobiusMatrix P = MobiusMatrix::Identity();
  for (Int k = 1; k <= max_order; ++k) {
    P = P * M;
    if ((P - MobiusMatrix::Identity()).cwiseAbs().maxCoeff() < tol) return k;
  }
  return 0;
}

/// Order of the monodromy R(2 pi q2, 2 pi q1).
inline Int monodromy_order(const Modulus& q) {
  const Int bound = q.order();
  for (Int k = 1; k <= bound; ++k)
    if ((monodromy_power(q, k) - MobiusMatrix::Identity()).cwiseAbs().maxCoeff() < 1e-12) return k;
  throw InvariantError("monodromy_order: no finite order up to " + std::to_string(bound));
}

struct SymmetryReport {
  Int order = 0;
  Int euclidean_order = 0;  ///< order of R^{n1}, a rotation about the z-axis
  Int clifford_order = 0;   ///< order of R^{n2}, a toroidal rotation
  bool euclidean_pure = false;
  bool clifford_pure = false;
};

inline SymmetryReport symmetry_report(const Modulus& q) {
  const auto s = symmetry_structure(q);
  const MobiusMatrix M = rotation_R(2.0 * std::numbers::pi * q.q2().value(), 2.0 * std::numbers::pi * q.q1().value());
  MobiusMatrix E = MobiusMatrix::Identity(), C = MobiusMatrix::Identity();
  for (Int i = 0; i < s.n1; ++i) E = E * M;
  for (Int i = 0; i < s.n2; ++i) C = C * M;
  // A z-rotation fixes e0, e3, e4; a toroidal rotation fixes e1, e2.
  auto fixes = [](const MobiusMatrix& F, std::initializer_list<int> axes) {
    for (int a : axes)
      if ((F.col(a) - MobiusMatrix::Identity().col(a)).cwiseAbs().maxCoeff() > 1e-8) return false;
    return true;
  };
  SymmetryReport r;
  r.order = monodromy_order(q);
  r.euclidean_order = matrix_order(E, s.n);
  r.clifford_order = matrix_order(C, s.n);
  r.euclidean_pure = fixes(E, {0, 3, 4});
  r.clifford_pure = fixes(C, {1, 2});
  return r;
}

struct FrameSample {
  double t;
  MobiusMatrix F;
};

/// Coefficient matrix of the Vessiot frame equation F' = F X(k1, k2).
inline MobiusMatrix vessiot_generator(double k1, double k2) {
  MobiusMatrix X;
  X << 0, 1, 0, 0, 0,
       k2, 0, 0, 0, 1,
       1, 0, 0, k1, 0,
       0, 0, -k1, 0, 0,
       0, k2, 1, 0, 0;
  return X;
}

/// Pulls a nearly pseudo-orthogonal matrix back onto the group.
inline MobiusMatrix reorthonormalize(MobiusMatrix F) {
  const MobiusMatrix g = lorentz_metric();
  for (int i = 0; i < 2; ++i) {
    const MobiusMatrix S = g * F.transpose() * g * F;
    F = F * (3.0 * MobiusMatrix::Identity() - S) * 0.5;
  }
  return F;
}

/// Classical RK4 for F' = F X(k1(t), k2(t)) from F(t0) = I, with `steps` equal steps.
inline std::vector<FrameSample> integrate_vessiot(const std::function<double(double)>& k1,
                                                  const std::function<double(double)>& k2, double t0,
                                                  double t1, std::size_t steps, std::size_t reorth_every = 64,
                                                  double drift_limit = 1e-8) {
  if (steps == 0) throw DomainError("integrate_vessiot: need at least one step");
  const double h = (t1 - t0) / static_cast<double>(steps);
  auto X = [&](double t) { return vessiot_generator(k1(t), k2(t)); };
  std::vector<FrameSample> out;
  out.reserve(steps + 1);
  MobiusMatrix F = MobiusMatrix::Identity();
  out.push_back({t0, F});
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const MobiusMatrix Xm = X(t + 0.5 * h);
    const MobiusMatrix K1 = F * X(t);
    const MobiusMatrix K2 = (F + 0.5 * h * K1) * Xm;
    const MobiusMatrix K3 = (F + 0.5 * h * K2) * Xm;
    const MobiusMatrix K4 = (F + h * K3) * X(t + h);
    F += h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    if ((i + 1) % reorth_every == 0) {
      F = reorthonormalize(F);
      const double drift = group_residual(F);
      if (!(drift < drift_limit))
        throw InvariantError("integrate_vessiot: group drift " + detail::num(drift) + " exceeds limit");
    }
    out.push_back({t0 + static_cast<double>(i + 1) * h, F});
  }
  return out;
}

/// Vessiot frame of the critical curve with conformal curvatures k(t) and -(3/2)k^2 + (a+b)/2.
inline std::vector<FrameSample> integrate_vessiot(const Parameters& p, double t0, double t1, std::size_t steps) {
  return integrate_vessiot([&](double t) { return curvature_k(p, t); },
                           [&](double t) { return second_curvature(p, t); }, t0, t1, steps);
}

struct InvariantSample {
  double t;
  double eta;    ///< d(conformal arclength)/dt; 0 at vertices
  double k1;     ///< first conformal curvature; NaN at vertices
  bool vertex;
};

namespace detail {

/// Periodic 7-point central differences of orders 1, 2 and 3.
template <class Get>
double periodic_diff(Get&& f, std::size_t i, std::size_t n, int order, double h) {
  const long len = static_cast<long>(n), base = static_cast<long>(i);
  auto at = [&](long off) { return f(static_cast<std::size_t>((base + off + len) % len)); };
  switch (order) {
    case 1:
      return (-at(-3) + 9 * at(-2) - 45 * at(-1) + 45 * at(1) - 9 * at(2) + at(3)) / (60 * h);
    case 2:
      return (2 * at(-3) - 27 * at(-2) + 270 * at(-1) - 490 * at(0) + 270 * at(1) - 27 * at(2) + 2 * at(3)) /
             (180 * h * h);
    default:
      return (-at(-3) + 8 * at(-2) - 13 * at(-1) + 13 * at(1) - 8 * at(2) + at(3)) / (8 * h * h * h);
  }
}

}  // namespace detail

struct InvariantOptions {
  std::size_t stride = 0;     ///< use every stride-th sample; 0 picks one from target_turn
  double target_turn = 0.03;  ///< tangent turning angle per used step when stride = 0
};

namespace detail {

/// Largest tangent turning angle between consecutive chords of a closed polyline.
inline double max_turning(const std::vector<Point3>& pts) {
  const std::size_t n = pts.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 u = sub(pts[(i + 1) % n], pts[i]), w = sub(pts[(i + 2) % n], pts[(i + 1) % n]);
    const double c = dot(u, w) / (norm(u) * norm(w));
    worst = std::max(worst, std::acos(std::clamp(c, -1.0, 1.0)));
  }
  return worst;
}

/// Largest divisor of n not exceeding limit.
inline std::size_t divisor_below(std::size_t n, std::size_t limit) {
  for (std::size_t d = std::max<std::size_t>(1, std::min(limit, n)); d > 1; --d)
    if (n % d == 0) return d;
  return 1;
}

}  // namespace detail

/// Conformal arclength density and first conformal curvature from raw samples.
///
/// Input must be a closed curve sampled uniformly in its parameter. Derivatives are
/// 7-point periodic central differences in the parameter, converted to arclength
/// derivatives by the chain rule. Very dense input is thinned first, since k1 involves
/// fifth derivatives and rounding noise grows like h^-5. A sample is a vertex when
/// kappa_s^2 + kappa^2 tau^2 < 1e-8 kappa^4.
inline std::vector<InvariantSample> conformal_invariants(const CurveSamples& s, const InvariantOptions& opt = {}) {
  if (!s.meta.closed) throw SamplingError("conformal_invariants: samples must describe a closed curve");
  if (s.size() < 16) throw SamplingError("conformal_invariants: need at least 16 samples");
  const double h0 = s.ts[1] - s.ts[0];
  for (std::size_t i = 1; i < s.size(); ++i)
    if (std::abs((s.ts[i] - s.ts[i - 1]) - h0) > 1e-9 * std::abs(h0))
      throw SamplingError("conformal_invariants: samples must be uniform in t");

  std::size_t stride = opt.stride;
  if (stride == 0) {
    const double turn = detail::max_turning(s.points);
    const auto wanted = turn > 0.0 ? static_cast<std::size_t>(opt.target_turn / turn) : 1;
    stride = detail::divisor_below(s.size(), std::min(wanted, s.size() / 16));
  }
  if (s.size() % stride != 0) throw SamplingError("conformal_invariants: stride must divide the sample count");
  std::vector<Point3> pts;
  std::vector<double> ts;
  for (std::size_t i = 0; i < s.size(); i += stride) {
    pts.push_back(s.points[i]);
    ts.push_back(s.ts[i]);
  }
  const std::size_t n = pts.size();
  const double h = h0 * static_cast<double>(stride);

  std::vector<double> speed(n), kappa(n), tau(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point3 d1, d2, d3;
    for (int c = 0; c < 3; ++c) {
      auto coord = [&](std::size_t j) { return pts[j][c]; };
      d1[c] = detail::periodic_diff(coord, i, n, 1, h);
      d2[c] = detail::periodic_diff(coord, i, n, 2, h);
      d3[c] = detail::periodic_diff(coord, i, n, 3, h);
    }
    const Point3 b = detail::cross(d1, d2);
    const double v = detail::norm(d1), bn = detail::norm(b);
    speed[i] = v;
    kappa[i] = bn / (v * v * v);
    tau[i] = bn > 0.0 ? detail::dot(b, d3) / (bn * bn) : 0.0;
  }

  std::vector<InvariantSample> out(n);
  auto get = [](const std::vector<double>& f) { return [&f](std::size_t j) { return f[j]; }; };
  for (std::size_t i = 0; i < n; ++i) {
    const double v = speed[i], k = kappa[i], t = tau[i];
    const double k_s = detail::periodic_diff(get(kappa), i, n, 1, h) / v;
    const double v_t = detail::periodic_diff(get(speed), i, n, 1, h);
    const double k_ss = (detail::periodic_diff(get(kappa), i, n, 2, h) - k_s * v_t) / (v * v);
    const double t_s = detail::periodic_diff(get(tau), i, n, 1, h) / v;
    const double Q = k_s * k_s + k * k * t * t;
    InvariantSample& o = out[i];
    o.t = ts[i];
    o.vertex = Q < 1e-8 * k * k * k * k;
    if (o.vertex) {
      o.eta = 0.0;
      o.k1 = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double r = std::pow(Q, -0.25);
    o.eta = v / r;
    o.k1 = std::pow(r, 5) * (k * k * t * t * t + k * k_s * t_s + t * (2 * k_s * k_s - k * k_ss));
  }
  return out;
}

/// As conformal_invariants, but a vertex anywhere is an error.
inline std::vector<InvariantSample> conformal_invariants_generic(const CurveSamples& s,
                                                                const InvariantOptions& opt = {}) {
  auto out = conformal_invariants(s, opt);
  for (const auto& o : out)
    if (o.vertex) throw VertexError("conformal_invariants: vertex at t = " + detail::num(o.t));
  return out;
}

/// max |(lift, lift)| over `count` times spread across one wavelength.
inline double null_lift_residual(const Parameters& p, std::size_t count = 64) {
  const auto s = make_string_model(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = s.omega * static_cast<double>(i) / static_cast<double>(count);
    const auto th = theta_phases(s, t);
    const auto v = detail::lift_from(detail::radicals(s, t), th);
    worst = std::max(worst, std::abs(minkowski_dot(v, v)));
  }
  return worst;
}

/// Largest disagreement between the projected lift and gamma, and between Psi(gamma) and gamma*.
inline double projection_coherence(const Parameters& p, std::size_t count = 64) {
  const auto s = make_string_model(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = s.omega * static_cast<double>(i) / static_cast<double>(count);
    const auto g = gamma_at(s, t);
    const auto projected = mobius_project(null_lift(p, t));
    const auto psi = involution_Psi(g);
    const auto star = gamma_star(p, t);
    worst = std::max({worst, detail::norm(detail::sub(projected, g)), detail::norm(detail::sub(psi, star))});
  }
  return worst;
}

/// Distance between the spectrum of the momentum matrix and {0, +-i mu, +-i nu}.
inline double momentum_spectrum_error(const Parameters& p) {
  const auto sc = spectral_constants(p);
  Eigen::EigenSolver<MobiusMatrix> solver(momentum_matrix(p), false);
  std::vector<double> imag, expected = {-sc.mu, -sc.nu, 0.0, sc.nu, sc.mu};
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    worst = std::max(worst, std::abs(solver.eigenvalues()(i).real()));
    imag.push_back(solver.eigenvalues()(i).imag());
  }
  std::sort(imag.begin(), imag.end());
  for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(imag[i] - expected[i]));
  return worst;
}

}  // namespace conformal
