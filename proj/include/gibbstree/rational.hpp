#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gibbstree {

using Rational = mpq_class;

inline int sign(const Rational& x) { return sgn(x); }
inline double to_double(const Rational& x) { return x.get_d(); }

/// n/d in lowest terms. mpq_class(n, d) alone leaves the fraction as given.
inline Rational ratio(long n, long d) {
  if (d == 0) {
    throw std::domain_error("zero denominator");
  }
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Parses "num/den", an integer, or a plain decimal such as "-1.25e-3".
/// The result is exact and canonicalized.
Rational parse_rational(std::string_view text);

/// Always "num/den", with den = 1 for integers.
std::string format_rational(const Rational& x);

/// Shortest continued-fraction convergent of `x` that converts back to the
/// same double. Falls back to the last convergent whose denominator fits in
/// `max_denominator` when no shorter one round-trips.
Rational rationalize(double x, std::uint64_t max_denominator = std::uint64_t{1} << 63);

/// Simplest convergent within relative_tol of x, so that a parameter that
/// went through exp(log(.)) comes back as the rational it was typed as
/// (exp(log(5)) = 4.999999999999999 -> 5).
Rational rationalize_near(double x, double relative_tol = 1e-15);

}  // namespace gibbstree
