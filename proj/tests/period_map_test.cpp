#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace conformal;
using conformal::testing::Generator;

struct TableRow {
  Rational q1, q2;
  double a, b, omega;
};

const std::vector<TableRow>& n9_table() {
  static const std::vector<TableRow> rows = {
      {{5, 9}, {1, 9}, 18.6403, 0.06069, 1.96996}, {{5, 9}, {2, 9}, 16.9699, 0.09982, 1.92188},
      {{5, 9}, {1, 3}, 13.3269, 0.29125, 1.81376}, {{2, 3}, {1, 9}, 2.6203, 0.42577, 2.90618},
      {{2, 3}, {2, 9}, 1.7209, 0.90777, 2.79219},
  };
  return rows;
}

double diagonal_limit(double a) { return 1.0 / (8.0 * std::pow(a, 1.5) * std::sqrt(1.0 + a)); }

TEST(PhiQuadrature, MatchesHighPrecisionReference) {
  const auto v = phi_quadrature(Parameters(2, 1));
  EXPECT_NEAR(v.phi1, -0.64858420068313345862, 1e-11);
  EXPECT_NEAR(v.phi2, 0.26872922015390313453, 1e-11);
}

TEST(PhiClosed, MatchesHighPrecisionReference) {
  struct Ref {
    double a, b, phi1, phi2;
  };
  for (const auto& r : {Ref{2, 1, -0.64858420068313345862, 0.26872922015390313453},
                        Ref{10, 0.5, -0.56169482454073831032, 0.35704826176141721131},
                        Ref{3, 0.4, -0.65529570308611424923, 0.14139689689395856393}}) {
    const auto v = phi_closed(Parameters(r.a, r.b));
    EXPECT_NEAR(v.phi1, r.phi1, 1e-14);
    EXPECT_NEAR(v.phi2, r.phi2, 1e-14);
  }
}

TEST(PhiClosed, AgreesWithQuadratureOnGrid) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double a = 1.0 + 19.0 * (i + 0.5) / 20.0;
      const double b = 1.0 / a + (a - 1.0 / a) * (j + 0.5) / 20.0;
      const Parameters p(a, b);
      const auto c = phi_closed(p), q = phi_quadrature(p);
      worst = std::max({worst, std::abs(c.phi1 - q.phi1), std::abs(c.phi2 - q.phi2)});
    }
  EXPECT_LT(worst, 1e-9);
}

TEST(PhiClosed, TabulatedParametersHitTheirModuli) {
  for (const auto& row : n9_table()) {
    const auto v = phi_closed(Parameters(row.a, row.b));
    EXPECT_NEAR(v.phi1, -row.q1.value(), 2e-4) << row.q1.str();
    EXPECT_NEAR(v.phi2, row.q2.value(), 2e-4) << row.q2.str();
  }
}

TEST(PhiClosed, RejectsPointsOutsideSigma) {
  EXPECT_THROW(phi_closed(Parameters(2, 0.4)), DomainError);
  EXPECT_THROW(phi_quadrature(Parameters(1, -1)), DomainError);
}

TEST(PhiClosed, ImageLiesInOmegaTilde) {
  Generator g(31);
  for (int i = 0; i < 500; ++i) {
    const auto p = g.sigma_point(1.01, 40.0);
    const auto v = phi_closed(p);
    EXPECT_TRUE(domain_predicates(v.phi1, v.phi2).in_OmegaTilde) << p.a() << ' ' << p.b();
  }
}

TEST(PhiClosed, IncreasingInBothParameters) {
  Generator g(32);
  for (int i = 0; i < 200; ++i) {
    const auto p = g.sigma_point(1.1, 20.0);
    const double h = 1e-4 * (p.a() - p.b());
    const auto v = phi_closed(p);
    const auto va = phi_closed({p.a() + h, p.b()});
    const auto vb = phi_closed({p.a(), p.b() + h});
    EXPECT_GT(va.phi1, v.phi1);
    EXPECT_GT(va.phi2, v.phi2);
    EXPECT_GT(vb.phi1, v.phi1);
    EXPECT_GT(vb.phi2, v.phi2);
  }
}

TEST(Boundary, VertexAndLimits) {
  const double r = 1.0 / std::numbers::sqrt2;
  EXPECT_NEAR(phi_boundary_plus(1).phi1, -r, 1e-15);
  EXPECT_EQ(phi_boundary_plus(1).phi2, 0.0);
  EXPECT_NEAR(phi_boundary_minus(1).phi1, -r, 1e-15);
  EXPECT_EQ(phi_boundary_minus(1).phi2, 0.0);
  const auto far = phi_boundary_plus(1e10);
  EXPECT_NEAR(far.phi1, -0.5, 1e-9);
  EXPECT_NEAR(far.phi2, 0.5, 1e-9);
  EXPECT_THROW(phi_boundary_plus(0.5), DomainError);
}

TEST(Boundary, DiagonalApproachIsLinearInDistance) {
  for (double a : {1.5, 2.0, 5.0}) {
    const auto target = phi_boundary_plus(a);
    double previous = INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto v = phi_closed({a, a - eps});
      const double d = conformal::testing::max_abs(v.phi1 - target.phi1, v.phi2 - target.phi2);
      EXPECT_LT(d, previous / 5.0);
      EXPECT_LT(d, 0.1 * eps);
      previous = d;
    }
    EXPECT_LT(previous, 1e-3);
  }
}

TEST(Boundary, HyperbolaApproach) {
  for (double a : {1.5, 3.0, 10.0}) {
    const auto v = phi_closed({a, (1.0 + 1e-8) / a});
    const auto w = phi_boundary_minus(a);
    EXPECT_NEAR(v.phi1, w.phi1, 1e-3);
    EXPECT_NEAR(v.phi2, 0.0, 1e-3);
  }
}

TEST(Partials, MatchHighPrecisionReference) {
  const auto j = phi_partials(Parameters(2, 1));
  EXPECT_EQ(j.source, PartialsSource::analytic);
  EXPECT_NEAR(j.da_phi1, 0.039981146284355680205, 1e-12);
  EXPECT_NEAR(j.db_phi1, 0.053960539418773126010, 1e-12);
  EXPECT_NEAR(j.da_phi2, 0.078670246731686504682, 1e-12);
  EXPECT_NEAR(j.db_phi2, 0.16727227939956477407, 1e-12);
  EXPECT_NEAR(j.det, 0.0024426485221418370373, 1e-14);
  const auto k = phi_partials(Parameters(10, 0.5));
  EXPECT_NEAR(k.da_phi1, 0.0046811557901979605801, 1e-13);
  EXPECT_NEAR(k.db_phi1, 0.028900395257240638169, 1e-13);
  EXPECT_NEAR(k.da_phi2, 0.0074688043716647330872, 1e-13);
  EXPECT_NEAR(k.db_phi2, 0.16218723931856028302, 1e-12);
}

TEST(Partials, AllPositiveAndPassTheGate) {
  Generator g(33);
  const long before = partials_fallback_count();
  for (int i = 0; i < 60; ++i) {
    const auto p = g.sigma_point();
    const auto j = phi_partials(p);
    EXPECT_GT(j.da_phi1, 0.0);
    EXPECT_GT(j.db_phi1, 0.0);
    EXPECT_GT(j.da_phi2, 0.0);
    EXPECT_GT(j.db_phi2, 0.0);
    EXPECT_LT(j.gate_error, 1e-4);
    EXPECT_GT(j.det, 0.0);
  }
  EXPECT_EQ(partials_fallback_count(), before);
}

TEST(Partials, GateFallsBackToFiniteDifferences) {
  const long before = partials_fallback_count();
  const auto j = phi_partials(Parameters(2, 1), 0.0);
  EXPECT_EQ(j.source, PartialsSource::finite_difference);
  EXPECT_EQ(partials_fallback_count(), before + 1);
  EXPECT_NEAR(j.da_phi1, 0.039981146284355680205, 1e-8);
}

TEST(Partials, DiagonalLimit) {
  EXPECT_NEAR(phi_partials_diagonal(1.0 + 1e-12).da_phi1, 1.0 / (8.0 * std::numbers::sqrt2), 1e-10);
  for (double a : {1.5, 2.0, 5.0, 12.0}) {
    EXPECT_NEAR(phi_partials_diagonal(a).da_phi1, diagonal_limit(a), 1e-14);
    const double d = 1e-6;
    const double near = phi_partials({a, a - d}).da_phi1;
    const double nearer = phi_partials({a, a - d / 2}).da_phi1;
    EXPECT_NEAR(2.0 * nearer - near, diagonal_limit(a), 1e-8) << a;
  }
  EXPECT_NEAR(diagonal_limit(1.0), 0.088388, 1e-6);
}

TEST(Jacobian, PositiveAndMatchesFiniteDifferences) {
  EXPECT_GT(phi_jacobian(Parameters(2, 1)), 0.0);
  EXPECT_GT(phi_jacobian(Parameters(18.6403, 0.06069)), 0.0);
  Generator g(34);
  for (int i = 0; i < 30; ++i) {
    const auto p = g.sigma_point();
    const double det = phi_jacobian(p);
    const double fd = phi_partials_fd(p).det;
    EXPECT_NEAR(det, fd, 1e-3 * std::abs(fd));
    EXPECT_NEAR(jacobian_closed_form(p), det, 1e-8 * std::abs(det));
  }
}

TEST(Jacobian, TranscribedBlocks) {
  const auto t = transcribed_partials(Parameters(2, 1));
  EXPECT_FALSE(t.trusted[0]);
  EXPECT_TRUE(t.trusted[1]);
  EXPECT_TRUE(t.trusted[2]);
  EXPECT_TRUE(t.trusted[3]);
}

TEST(LevelFields, DecreasingGraphs) {
  const auto [u1, u2] = level_fields(Parameters(2, 1));
  EXPECT_LT(u1[1], 0.0);
  EXPECT_LT(u2[1], 0.0);

  const Parameters p(3, 2);
  const auto [v1, v2] = level_fields(p);
  EXPECT_GT(std::abs(v1[1] - v2[1]), 1e-3);
  const double h = 1e-4;
  const double d1 = (phi_quadrature({3 + h * v1[0], 2 + h * v1[1]}, 1e-14).phi1 -
                     phi_quadrature({3 - h * v1[0], 2 - h * v1[1]}, 1e-14).phi1) /
                    (2 * h);
  const double d2 = (phi_quadrature({3 + h * v2[0], 2 + h * v2[1]}, 1e-14).phi2 -
                     phi_quadrature({3 - h * v2[0], 2 - h * v2[1]}, 1e-14).phi2) /
                    (2 * h);
  EXPECT_NEAR(d1, 0.0, 1e-8);
  EXPECT_NEAR(d2, 0.0, 1e-8);
}

TEST(Inversion, ReproducesTheOrderNineTable) {
  for (const auto& row : n9_table()) {
    const auto r = invert_period_map_detailed(Modulus(row.q1, row.q2));
    EXPECT_NEAR(r.params.a(), row.a, 5e-4 * row.a);
    EXPECT_NEAR(r.params.b(), row.b, 5e-4 * row.b);
    EXPECT_NEAR(wavelength_omega(r.params), row.omega, 5e-4 * row.omega);
    EXPECT_LE(r.residual, 1e-10);
  }
}

TEST(Inversion, HighPrecisionSolution) {
  const auto p = invert_period_map(Modulus({5, 9}, {1, 9}));
  EXPECT_NEAR(p.a(), 18.64032519449394, 1e-9);
  EXPECT_NEAR(p.b(), 0.06069072985052465, 1e-12);
}

TEST(Inversion, RoundTripOnRandomModuli) {
  Generator g(35);
  for (int i = 0; i < 100; ++i) {
    const auto q = g.omega_rational();
    const auto r = invert_period_map_detailed(q);
    const auto v = phi_closed(r.params);
    EXPECT_NEAR(v.phi1, -q.q1().value(), 1e-10) << q.str();
    EXPECT_NEAR(v.phi2, q.q2().value(), 1e-10) << q.str();
    EXPECT_TRUE(r.params.in_sigma());
  }
}

TEST(Inversion, SeedLiesInSigma) {
  Generator g(36);
  for (int i = 0; i < 100; ++i) {
    const auto q = g.omega_rational();
    const auto [a, b] = inversion_seed(q.q1().value(), q.q2().value());
    EXPECT_GT(a * b, 1.0);
    EXPECT_GT(a, b);
  }
}

TEST(Inversion, ReportsUnattainableTolerance) {
  NewtonOptions opt;
  opt.tolerance = 1e-30;
  opt.polish = 1e-30;
  EXPECT_THROW(invert_period_map_detailed(Modulus({5, 9}, {1, 9}), opt), ConvergenceError);
}

TEST(Cache, KeyUsesTheCommonDenominator) {
  EXPECT_EQ(cache_key(Modulus({5, 9}, {1, 3})), "5/9,3/9");
  EXPECT_EQ(cache_key(Modulus({3, 5}, {1, 5})), "3/5,1/5");
}

TEST(Cache, HitsReturnStoredValues) {
  InversionCache cache;
  const Modulus q({5, 9}, {2, 9});
  const auto cold = invert_cached(q, cache);
  EXPECT_EQ(cache.size(), 1u);
  const auto warm = invert_cached(q, cache);
  EXPECT_EQ(cold, warm);
  cache.store(cache_key(q), {1, 2, 3, 0});
  EXPECT_EQ(invert_cached(q, cache).a, 1.0);
}

TEST(Cache, ConcurrentInversionsAgree) {
  InversionCache cache;
  const auto moduli = enumerate_moduli(9);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&] {
      for (const auto& q : moduli) invert_cached(q, cache);
    });
  for (auto& t : workers) t.join();
  EXPECT_EQ(cache.size(), moduli.size());
  for (const auto& q : moduli) {
    const auto r = invert_period_map_detailed(q);
    EXPECT_EQ(cache.find(cache_key(q))->a, r.params.a());
  }
}

}  // namespace
