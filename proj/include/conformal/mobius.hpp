#pragma once

// Light-cone model of Moebius geometry: R^{4,1} with
// (v, w) = -(v0 w4 + v4 w0) + v1 w1 + v2 w2 + v3 w3.

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "conformal/errors.hpp"

namespace conformal {

using LightConeVector = Eigen::Matrix<double, 5, 1>;
using MobiusMatrix = Eigen::Matrix<double, 5, 5>;
using Point3 = std::array<double, 3>;

inline MobiusMatrix lorentz_metric() {
  MobiusMatrix g = MobiusMatrix::Zero();
  g(0, 4) = g(4, 0) = -1.0;
  g(1, 1) = g(2, 2) = g(3, 3) = 1.0;
  return g;
}

inline double minkowski_dot(const LightConeVector& v, const LightConeVector& w) {
  return -(v(0) * w(4) + v(4) * w(0)) + v(1) * w(1) + v(2) * w(2) + v(3) * w(3);
}

/// x -> (|x|^2/2, x, y, z, 1).
inline LightConeVector mobius_embed(const Point3& x) {
  LightConeVector v;
  v << 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), x[0], x[1], x[2], 1.0;
  return v;
}

/// (v1, v2, v3)/v4; v4 = 0 is the point at infinity.
inline Point3 mobius_project(const LightConeVector& v) {
  if (v(4) == 0.0 || !std::isfinite(v(4))) throw DomainError("mobius_project: v4 = 0 (point at infinity)");
  return {v(1) / v(4), v(2) / v(4), v(3) / v(4)};
}

/// max |F^T g F - g|; zero for elements of the Moebius group.
inline double group_residual(const MobiusMatrix& F) {
  const MobiusMatrix g = lorentz_metric();
  return (F.transpose() * g * F - g).cwiseAbs().maxCoeff();
}

/// max |X^T g + g X|; zero for elements of the Lie algebra.
inline double skew_adjoint_residual(const MobiusMatrix& X) {
  const MobiusMatrix g = lorentz_metric();
  return (X.transpose() * g + g * X).cwiseAbs().maxCoeff();
}

/// Rotation by phi1 about the z-axis composed with the toroidal rotation by phi2
/// about the Clifford circle x^2 + y^2 = 2, z = 0.
inline MobiusMatrix rotation_R(double phi1, double phi2) {
  const double c1 = std::cos(phi1), s1 = std::sin(phi1);
  const double c2 = std::cos(phi2), s2 = std::sin(phi2);
  const double r2 = std::numbers::sqrt2;
  MobiusMatrix R;
  R << (1 + c2) / 2, 0, 0, -s2 / r2, (1 - c2) / 2,
       0, c1, -s1, 0, 0,
       0, s1, c1, 0, 0,
       s2 / r2, 0, 0, c2, -s2 / r2,
       (1 - c2) / 2, 0, 0, s2 / r2, (1 + c2) / 2;
  return R;
}

/// Linear form of the involution Psi on the light cone.
inline MobiusMatrix psi_matrix() {
  const double h = 1.0 / std::numbers::sqrt2;
  MobiusMatrix P = MobiusMatrix::Zero();
  P(0, 0) = 0.5, P(0, 1) = -h, P(0, 4) = 0.5;
  P(1, 0) = -h, P(1, 4) = h;
  P(2, 3) = 1.0;
  P(3, 2) = 1.0;
  P(4, 0) = 0.5, P(4, 1) = h, P(4, 4) = 0.5;
  return P;
}

/// Orientation-preserving conformal involution exchanging the z-axis and the Clifford circle.
///
/// Psi(x) = (sqrt2 (2 - |x|^2), 4z, 4y) / (|x|^2 + 2 sqrt2 x + 2); the pole is (-sqrt2, 0, 0).
inline Point3 involution_Psi(const Point3& p) {
  const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
  const double den = r2 + 2.0 * std::numbers::sqrt2 * p[0] + 2.0;
  if (!(den > 1e-14 * (r2 + 2.0))) throw DomainError("involution_Psi: pole at (-sqrt2, 0, 0)");
  return {std::numbers::sqrt2 * (2.0 - r2) / den, 4.0 * p[2] / den, 4.0 * p[1] / den};
}

/// The oriented Clifford circle, beta(t) = (-sqrt2 (t^2 - 2), 4t, 0) / (t^2 + 2).
inline Point3 clifford_beta(double t) {
  const double den = t * t + 2.0;
  return {-std::numbers::sqrt2 * (t * t - 2.0) / den, 4.0 * t / den, 0.0};
}

}  // namespace conformal
