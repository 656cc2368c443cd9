#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "conformal/errors.hpp"

namespace conformal {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;            ///< estimated absolute error
  std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error, roundoff;
  bool operator<(const Panel& other) const { return error < other.error; }
};

/// One G7/K15 panel with the QUADPACK error heuristic.
template <class F>
Panel gauss_kronrod_15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f_left{}, f_right{};

  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f_left[j] = f(center - dx);
    f_right[j] = f(center + dx);
    const double pair = f_left[j] + f_right[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f_left[j]) + std::abs(f_right[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));

  const double result = kronrod * half;
  asc *= std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
  error = std::max(error, roundoff);
  return {lo, hi, result, error, roundoff};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [lo, hi].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below max(tol, rel_tol * |integral|) or below the accumulated
/// rounding floor of the panels. Throws ConvergenceError once more than `max_evaluations`
/// integrand calls would be needed.
template <class F>
QuadratureResult integrate_adaptive_detailed(F&& f, double lo, double hi, double tol, double rel_tol = 0.0,
                                             std::size_t max_evaluations = 1'000'000) {
  if (!(tol > 0.0) || rel_tol < 0.0) throw DomainError("integrate_adaptive: tolerance must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("integrate_adaptive: bounds must be finite");
  if (lo == hi) return {};

  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }

  std::priority_queue<detail::Panel> panels;
  auto first = detail::gauss_kronrod_15(f, lo, hi);
  std::size_t evaluations = 15;
  double total = first.value;
  double total_error = first.error;
  double total_roundoff = first.roundoff;
  panels.push(first);

  while (total_error > std::max(tol, rel_tol * std::abs(total)) && total_error > total_roundoff) {
    if (evaluations + 30 > max_evaluations) {
      throw ConvergenceError("integrate_adaptive: refinement budget exhausted on [" +
                             detail::num(lo) + ", " + detail::num(hi) +
                             "], error estimate " + detail::num(total_error));
    }
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      throw ConvergenceError("integrate_adaptive: panel width reached machine resolution");
    }
    auto left = detail::gauss_kronrod_15(f, worst.lo, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.hi);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    total_roundoff += left.roundoff + right.roundoff - worst.roundoff;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift of the running update.
  double sum = 0.0, err = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {sign * sum, err, evaluations};
}

template <class F>
double integrate_adaptive(F&& f, double lo, double hi, double tol, double rel_tol = 0.0) {
  return integrate_adaptive_detailed(std::forward<F>(f), lo, hi, tol, rel_tol).value;
}

}  // namespace conformal
