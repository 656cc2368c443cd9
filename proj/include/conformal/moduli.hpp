#pragma once

// Exact arithmetic on the moduli set Omega*: rational points q = (q1, q2) with
// 1/2 < q1 < 1/sqrt(2), q2 > 0, q1^2 + q2^2 < 1/2. No floating point is used
// for membership decisions.

#include <cctype>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "conformal/errors.hpp"

namespace conformal {

using Int = std::int64_t;
using Wide = __int128;

/// Reduced fraction with positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(Int num, Int den) : num_(num), den_(den) {
    if (den == 0) throw DomainError("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const Int g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  /// Parses "p/q" (or a bare integer "p").
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    auto parse_int = [&](std::string_view s) -> Int {
      s = trim(s);
      if (s.empty()) throw ParseError("rational literal: empty integer field");
      std::size_t i = 0;
      bool negative = false;
      if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
      }
      if (i == s.size()) throw ParseError("rational literal: missing digits");
      Wide value = 0;
      for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
          throw ParseError("rational literal: unexpected character '" + std::string(1, s[i]) + "'");
        value = value * 10 + (s[i] - '0');
        if (value > static_cast<Wide>(INT64_MAX)) throw ParseError("rational literal: integer overflow");
      }
      return static_cast<Int>(negative ? -value : value);
    };
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text), 1);
    const Int den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("rational literal: zero denominator");
    return Rational(parse_int(text.substr(0, slash)), den);
  }

  Int num() const { return num_; }
  Int den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& x, const Rational& y) {
    return static_cast<Wide>(x.num_) * y.den_ < static_cast<Wide>(y.num_) * x.den_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  Int num_ = 0;
  Int den_ = 1;
};

/// Strict membership of (q1, q2) in Omega, by integer inequalities only.
inline bool in_omega(const Rational& q1, const Rational& q2) {
  const Wide m1 = q1.num(), n1 = q1.den(), m2 = q2.num(), n2 = q2.den();
  if (!(2 * m1 > n1)) return false;        // q1 > 1/2
  if (!(2 * m1 * m1 < n1 * n1)) return false;  // q1 < 1/sqrt(2)
  if (!(m2 > 0)) return false;             // q2 > 0
  return 2 * (m1 * m1 * n2 * n2 + m2 * m2 * n1 * n1) < n1 * n1 * n2 * n2;
}

/// A modulus q = q1 + i q2 in Omega*.
class Modulus {
 public:
  Modulus(Rational q1, Rational q2) : q1_(q1), q2_(q2) {
    if (!in_omega(q1, q2))
      throw DomainError("modulus (" + q1.str() + ", " + q2.str() + ") is outside Omega");
  }

  const Rational& q1() const { return q1_; }
  const Rational& q2() const { return q2_; }

  /// Symmetry order n = lcm of the reduced denominators.
  Int order() const { return std::lcm(q1_.den(), q2_.den()); }

  std::string str() const { return "(" + q1_.str() + ", " + q2_.str() + ")"; }

  friend bool operator==(const Modulus&, const Modulus&) = default;
  friend bool operator<(const Modulus& x, const Modulus& y) {
    if (x.q1_ == y.q1_) return x.q2_ < y.q2_;
    return x.q1_ < y.q1_;
  }

 private:
  Rational q1_;
  Rational q2_;
};

/// |n, l1, l2>: symmetry order and linking numbers with the Clifford circle and the z-axis.
struct QuantumNumbers {
  Int n = 0;
  Int l1 = 0;
  Int l2 = 0;
  friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;
};

/// Derived integers for q1 = m1/n1, q2 = m2/n2: n = lcm(n1, n2) = h1 n1 = h2 n2.
///
/// h1 is the order of the Euclidean symmetry subgroup and h2 the order of the
/// Clifford one.
struct SymmetryStructure {
  Int n, m1, n1, m2, n2, h1, h2;
};

inline SymmetryStructure symmetry_structure(const Modulus& q) {
  const Int n = q.order();
  return {n, q.q1().num(), q.q1().den(), q.q2().num(), q.q2().den(), n / q.q1().den(), n / q.q2().den()};
}

inline QuantumNumbers quantum_from_modulus(const Modulus& q) {
  const auto s = symmetry_structure(q);
  return {s.n, s.m1 * s.h1, s.m2 * s.h2};
}

/// Inverse of quantum_from_modulus; rejects labels that are not realised by a string.
inline Modulus modulus_from_quantum(const QuantumNumbers& qn) {
  if (qn.n < 1 || qn.l1 < 1 || qn.l2 < 1)
    throw DomainError("quantum numbers must be positive integers");
  const Rational q1(qn.l1, qn.n), q2(qn.l2, qn.n);
  const std::string label = "|" + std::to_string(qn.n) + "," + std::to_string(qn.l1) + "," +
                            std::to_string(qn.l2) + ">";
  if (!in_omega(q1, q2))
    throw DomainError("label " + label + ": modulus (" + q1.str() + ", " + q2.str() +
                      ") violates the Omega inequalities");
  const Int lcm = std::lcm(q1.den(), q2.den());
  if (lcm != qn.n)
    throw DomainError("label " + label + ": reduced denominators have lcm " + std::to_string(lcm) +
                      " != n = " + std::to_string(qn.n));
  return Modulus(q1, q2);
}

/// All moduli of symmetry order n, sorted by (l1, l2).
inline std::vector<Modulus> enumerate_moduli(Int n) {
  if (n < 1) throw DomainError("enumerate_moduli: n must be >= 1");
  std::vector<Modulus> out;
  for (Int l1 = 1; l1 < n; ++l1) {
    const Rational q1(l1, n);
    for (Int l2 = 1; l2 < n; ++l2) {
      const Rational q2(l2, n);
      if (!in_omega(q1, q2)) {
        if (2 * (static_cast<Wide>(l1) * l1 + static_cast<Wide>(l2) * l2) >= static_cast<Wide>(n) * n)
          break;  // every larger l2 is outside too
        continue;
      }
      if (std::lcm(q1.den(), q2.den()) == n) out.emplace_back(q1, q2);
    }
  }
  return out;
}

inline Int rho(Int n) { return static_cast<Int>(enumerate_moduli(n).size()); }

/// Calls sink(n, rho(n)) for n = 1..n_max in increasing order.
template <class Sink>
void rho_table(Int n_max, Sink&& sink) {
  for (Int n = 1; n <= n_max; ++n) sink(n, rho(n));
}

inline std::vector<std::pair<Int, Int>> rho_table(Int n_max) {
  std::vector<std::pair<Int, Int>> rows;
  rho_table(n_max, [&](Int n, Int r) { rows.emplace_back(n, r); });
  return rows;
}

}  // namespace conformal
