#include "gibbstree/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gibbstree {

namespace {

Rational parse_decimal(std::string_view text) {
  std::string mantissa(text);
  long exponent = 0;
  if (auto e = mantissa.find_first_of("eE"); e != std::string::npos) {
    exponent = std::stol(mantissa.substr(e + 1));
    mantissa.resize(e);
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  std::string digits;
  for (char c : mantissa) {
    if (c == '.') {
      continue;
    }
    if (c < '0' || c > '9') {
      throw std::invalid_argument("malformed rational: " + std::string(text));
    }
    digits.push_back(c);
  }
  if (digits.empty()) {
    throw std::invalid_argument("malformed rational: " + std::string(text));
  }
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    exponent -= static_cast<long>(mantissa.size() - dot - 1);
  }
  mpz_class numerator(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational result = exponent >= 0 ? Rational(numerator * scale) : Rational(numerator, scale);
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) {
    throw std::invalid_argument("empty rational");
  }
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    try {
      mpz_class num(std::string(text.substr(0, slash)), 10);
      mpz_class den(std::string(text.substr(slash + 1)), 10);
      if (den == 0) {
        throw std::invalid_argument("zero denominator");
      }
      Rational r(num, den);
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("malformed rational: " + std::string(text));
    }
  }
  return parse_decimal(text);
}

std::string format_rational(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

namespace {

/// Walks the convergents of the exact dyadic value of x and returns the first
/// one accepted by `good`, or the last one whose denominator fits.
template <typename Accept>
Rational first_convergent(double x, const mpz_class& limit, Accept good) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("cannot rationalize a non-finite value");
  }
  const Rational exact(x);
  // (h1, k1) is the latest convergent and (h2, k2) the one before it.
  mpz_class h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  mpz_class num = exact.get_num(), den = exact.get_den();
  Rational best = Rational(mpz_class(0));
  while (den != 0) {
    mpz_class quotient;
    mpz_fdiv_q(quotient.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    mpz_class h = quotient * h1 + h2;
    mpz_class k = quotient * k1 + k2;
    if (k > limit) {
      break;
    }
    h2 = h1;
    k2 = k1;
    h1 = h;
    k1 = k;
    best = Rational(h, k);
    best.canonicalize();
    if (good(best, exact)) {
      return best;
    }
    mpz_class remainder = num - quotient * den;
    num = den;
    den = remainder;
  }
  return best;
}

}  // namespace

Rational rationalize(double x, std::uint64_t max_denominator) {
  const mpz_class limit(std::to_string(max_denominator), 10);
  // mpq get_d truncates, so compare against the rounding interval of x instead.
  const Rational below(std::nextafter(x, -std::numeric_limits<double>::infinity()));
  const Rational above(std::nextafter(x, std::numeric_limits<double>::infinity()));
  return first_convergent(x, limit, [&](const Rational& r, const Rational& exact) {
    const Rational& neighbour = r < exact ? below : above;
    return 2 * abs(r - exact) < abs(neighbour - exact);
  });
}

Rational rationalize_near(double x, double relative_tol) {
  if (!(relative_tol >= 0.0)) {
    throw std::invalid_argument("relative tolerance must be non-negative");
  }
  const mpz_class limit = mpz_class(1) << 64;
  const Rational slack = Rational(relative_tol) * abs(Rational(x));
  return first_convergent(x, limit, [&](const Rational& r, const Rational& exact) { return abs(r - exact) <= slack; });
}

}  // namespace gibbstree
