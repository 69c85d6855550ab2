#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairdiv {

// Arbitrary-precision integers and rationals. Rational is always kept in
// lowest terms with a positive denominator, so structural equality is value
// equality and no operation ever rounds.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string format_rational(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

// Accepts "p/q" or a bare integer "p". The denominator must be positive.
inline Rational parse_rational(std::string_view text) {
  std::string_view num = text;
  std::string_view den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  const bool negative = !num.empty() && num.front() == '-';
  if (negative) num.remove_prefix(1);
  if (!detail::all_digits(num) || !detail::all_digits(den))
    throw std::invalid_argument("malformed rational \"" + std::string(text) +
                                "\", expected \"p/q\"");
  const Integer n{std::string(num)};
  const Integer d{std::string(den)};
  if (d == 0)
    throw std::invalid_argument("rational \"" + std::string(text) +
                                "\" has zero denominator");
  const Rational q(n, d);
  return negative ? Rational(-q) : q;
}

// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("value is not a finite number");
  return Rational(x);
}

inline Rational rational_pow(Rational base, uint64_t exponent) {
  Rational out = 1;
  while (exponent != 0) {
    if (exponent & 1) out *= base;
    base *= base;
    exponent >>= 1;
  }
  return out;
}

// Closest rational to x in [0,1] whose denominator is at most max_denominator.
// Candidates are the bounding multiples of 1/max_denominator plus the last
// continued-fraction convergent and semiconvergent inside the bound; ties go
// to the smaller denominator, then the smaller numerator, so the result is
// deterministic. A rational whose denominator already fits is returned as is.
inline Rational best_rational_in_unit(const Rational& x, const Integer& max_denominator) {
  if (max_denominator < 1)
    throw std::invalid_argument("denominator bound must be at least 1");
  if (x < 0 || x > 1) throw std::invalid_argument("value outside [0,1]");
  if (denominator(x) <= max_denominator) return x;

  std::vector<Rational> candidates;
  auto push = [&](const Integer& p, const Integer& q) {
    Rational r(p, q);
    if (r < 0) r = 0;
    if (r > 1) r = 1;
    candidates.push_back(std::move(r));
  };

  const Integer scaled = (numerator(x) * max_denominator) / denominator(x);
  push(scaled, max_denominator);
  push(scaled + 1, max_denominator);

  Integer n = numerator(x), d = denominator(x);
  Integer p2 = 0, q2 = 1, p1 = 1, q1 = 0;
  while (d != 0) {
    const Integer a = n / d;
    const Integer p = a * p1 + p2;
    const Integer q = a * q1 + q2;
    if (q > max_denominator) {
      push(p1, q1);  // q1 <= max_denominator: the first convergent has q == 1
      const Integer t = (max_denominator - q2) / q1;
      if (t >= 1) push(t * p1 + p2, t * q1 + q2);
      break;
    }
    p2 = p1;
    q2 = q1;
    p1 = p;
    q1 = q;
    const Integer r = n % d;
    n = d;
    d = r;
  }

  Rational best = candidates.front();
  Rational best_err = abs(x - best);
  for (size_t i = 1; i < candidates.size(); ++i) {
    const Rational err = abs(x - candidates[i]);
    if (err < best_err ||
        (err == best_err && (denominator(candidates[i]) < denominator(best) ||
                             (denominator(candidates[i]) == denominator(best) &&
                              numerator(candidates[i]) < numerator(best))))) {
      best = candidates[i];
      best_err = err;
    }
  }
  return best;
}

}  // namespace fairdiv
