#include <chrono>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace conformal;
using conformal::testing::Generator;

/// Membership in Omega by brute force over exact products, without the library predicate.
bool omega_by_hand(Int l1, Int l2, Int n) {
  const Wide a = l1, b = l2, d = n;
  return 2 * a > d && 2 * a * a < d * d && b > 0 && 2 * (a * a + b * b) < d * d;
}

TEST(Rational, ReducesAndNormalisesSign) {
  const Rational r(6, -8);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 4);
  EXPECT_EQ(Rational(3, 9), Rational(1, 3));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational(0, 5).den(), 1);
  EXPECT_THROW(Rational(1, 0), DomainError);
}

TEST(Rational, Parse) {
  EXPECT_EQ(Rational::parse("5/9"), Rational(5, 9));
  EXPECT_EQ(Rational::parse(" 10/18 "), Rational(5, 9));
  EXPECT_EQ(Rational::parse("-2/4"), Rational(-1, 2));
  EXPECT_EQ(Rational::parse("3"), Rational(3, 1));
  EXPECT_EQ(Rational::parse("5/9").str(), "5/9");
  for (const char* bad : {"", "/", "5/", "/9", "0.5", "5/0", "a/b", "1/2/3", "99999999999999999999/1"})
    EXPECT_THROW(Rational::parse(bad), ParseError) << bad;
}

TEST(Omega, MembershipExamples) {
  EXPECT_TRUE(in_omega({5, 9}, {1, 9}));
  EXPECT_FALSE(in_omega({3, 5}, {2, 5}));
  EXPECT_FALSE(in_omega({1, 2}, {1, 9}));
  EXPECT_FALSE(in_omega({5, 7}, {1, 100}));
  EXPECT_FALSE(in_omega({3, 5}, {0, 1}));
  EXPECT_THROW(Modulus({1, 2}, {1, 9}), DomainError);
}

TEST(Omega, AgreesWithFloatingPredicateAwayFromTheBoundary) {
  Generator g(41);
  for (int i = 0; i < 5000; ++i) {
    const Int d1 = g.integer(1, 200), d2 = g.integer(1, 200);
    const Rational q1(g.integer(0, d1), d1), q2(g.integer(0, d2), d2);
    const double x = q1.value(), y = q2.value();
    const double margin = std::min({std::abs(x - 0.5), std::abs(x - std::sqrt(0.5)), std::abs(x * x + y * y - 0.5)});
    if (margin < 1e-9) continue;
    EXPECT_EQ(in_omega(q1, q2), domain_predicates(x, y).in_Omega) << q1 << ' ' << q2;
  }
}

TEST(Quantum, FromModulus) {
  EXPECT_EQ(quantum_from_modulus(Modulus({5, 9}, {1, 3})), (QuantumNumbers{9, 5, 3}));
  EXPECT_EQ(quantum_from_modulus(Modulus({2, 3}, {2, 9})), (QuantumNumbers{9, 6, 2}));
  EXPECT_EQ(quantum_from_modulus(Modulus({3, 5}, {1, 5})), (QuantumNumbers{5, 3, 1}));
}

TEST(Quantum, ToModulus) {
  EXPECT_EQ(modulus_from_quantum({9, 5, 1}), Modulus({5, 9}, {1, 9}));
  EXPECT_THROW(modulus_from_quantum({9, 6, 3}), DomainError);
  for (Int l1 = 1; l1 < 4; ++l1)
    for (Int l2 = 1; l2 < 4; ++l2) EXPECT_THROW(modulus_from_quantum({4, l1, l2}), DomainError);
  EXPECT_THROW(modulus_from_quantum({0, 1, 1}), DomainError);
}

TEST(Quantum, ErrorNamesTheViolation) {
  try {
    modulus_from_quantum({18, 12, 2});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("lcm 9"), std::string::npos);
  }
  try {
    modulus_from_quantum({4, 1, 1});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("Omega"), std::string::npos);
  }
}

TEST(Symmetry, StructureOfAMixedModulus) {
  const auto s = symmetry_structure(Modulus({37, 63}, {24, 63}));
  EXPECT_EQ(s.n, 63);
  EXPECT_EQ(s.n1, 63);
  EXPECT_EQ(s.n2, 21);
  EXPECT_EQ(s.h1, 1);
  EXPECT_EQ(s.h2, 3);
}

TEST(Enumerate, OrderNine) {
  const std::vector<Modulus> expected = {Modulus({5, 9}, {1, 9}), Modulus({5, 9}, {2, 9}), Modulus({5, 9}, {1, 3}),
                                         Modulus({2, 3}, {1, 9}), Modulus({2, 3}, {2, 9})};
  EXPECT_EQ(enumerate_moduli(9), expected);
}

TEST(Enumerate, SmallOrders) {
  for (Int n = 1; n <= 4; ++n) EXPECT_TRUE(enumerate_moduli(n).empty());
  EXPECT_EQ(enumerate_moduli(5), std::vector<Modulus>{Modulus({3, 5}, {1, 5})});
  EXPECT_EQ(rho(9), 5);
  EXPECT_EQ(rho(5), 1);
}

TEST(Enumerate, MatchesBruteForce) {
  for (Int n = 1; n <= 60; ++n) {
    std::set<std::pair<Int, Int>> brute;
    for (Int l1 = 0; l1 <= n; ++l1)
      for (Int l2 = 0; l2 <= n; ++l2)
        if (omega_by_hand(l1, l2, n) && std::lcm(Rational(l1, n).den(), Rational(l2, n).den()) == n)
          brute.insert({l1, l2});
    std::set<std::pair<Int, Int>> listed;
    for (const auto& q : enumerate_moduli(n)) {
      const auto qn = quantum_from_modulus(q);
      EXPECT_EQ(qn.n, n);
      listed.insert({qn.l1, qn.l2});
    }
    EXPECT_EQ(listed, brute) << n;
  }
}

TEST(Enumerate, LabelsRoundTrip) {
  for (Int n = 1; n <= 60; ++n)
    for (const auto& q : enumerate_moduli(n)) EXPECT_EQ(modulus_from_quantum(quantum_from_modulus(q)), q);
}

TEST(Enumerate, SortedByLabels) {
  for (Int n : {30, 45, 60}) {
    const auto list = enumerate_moduli(n);
    for (std::size_t i = 1; i < list.size(); ++i) {
      const auto a = quantum_from_modulus(list[i - 1]), b = quantum_from_modulus(list[i]);
      EXPECT_TRUE(a.l1 < b.l1 || (a.l1 == b.l1 && a.l2 < b.l2));
    }
  }
}

TEST(Rho, TableUpToOneHundredTwenty) {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = rho_table(120);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(rows.size(), 120u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].first, static_cast<Int>(i + 1));
  EXPECT_EQ(rows[8].second, 5);
  EXPECT_LT(seconds, 10.0);
}

}  // namespace
