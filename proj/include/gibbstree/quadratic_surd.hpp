#pragma once

#include <stdexcept>

#include "gibbstree/rational.hpp"

namespace gibbstree {

/// Exact element p + r*sqrt(d) of the real quadratic field Q(sqrt(d)), d > 0
/// and not a perfect square. Values built from plain rationals carry d = 0 and
/// adopt the radicand of whatever they are combined with.
class QuadraticSurd {
 public:
  QuadraticSurd() = default;
  QuadraticSurd(long value) : rational_(value) {}                 // NOLINT(implicit)
  QuadraticSurd(const Rational& value) : rational_(value) {}     // NOLINT(implicit)
  QuadraticSurd(const Rational& rational, const Rational& irrational, const Rational& radicand)
      : rational_(rational), irrational_(irrational), radicand_(radicand) {
    if (sgn(radicand_) < 0) {
      throw std::invalid_argument("negative radicand");
    }
  }

  static QuadraticSurd sqrt_of(const Rational& radicand) { return {Rational(0), Rational(1), radicand}; }

  const Rational& rational_part() const { return rational_; }
  const Rational& irrational_part() const { return irrational_; }
  const Rational& radicand() const { return radicand_; }

  friend QuadraticSurd operator+(const QuadraticSurd& x, const QuadraticSurd& y) {
    return {x.rational_ + y.rational_, x.irrational_ + y.irrational_, common(x, y)};
  }
  friend QuadraticSurd operator-(const QuadraticSurd& x, const QuadraticSurd& y) {
    return {x.rational_ - y.rational_, x.irrational_ - y.irrational_, common(x, y)};
  }
  QuadraticSurd operator-() const { return {-rational_, -irrational_, radicand_}; }

  friend QuadraticSurd operator*(const QuadraticSurd& x, const QuadraticSurd& y) {
    const Rational d = common(x, y);
    return {x.rational_ * y.rational_ + x.irrational_ * y.irrational_ * d,
            x.rational_ * y.irrational_ + x.irrational_ * y.rational_, d};
  }

  friend QuadraticSurd operator/(const QuadraticSurd& x, const QuadraticSurd& y) {
    const Rational d = common(x, y);
    const Rational norm = y.rational_ * y.rational_ - y.irrational_ * y.irrational_ * d;
    if (sgn(norm) == 0) {
      throw std::domain_error("division by zero in Q(sqrt(d))");
    }
    const QuadraticSurd conj{y.rational_, -y.irrational_, d};
    const QuadraticSurd num = x * conj;
    return {num.rational_ / norm, num.irrational_ / norm, d};
  }

  friend bool operator==(const QuadraticSurd& x, const QuadraticSurd& y) {
    return x.rational_ == y.rational_ && x.irrational_ == y.irrational_;
  }

  friend int sign(const QuadraticSurd& x) {
    const int sp = sgn(x.rational_);
    const int sr = sgn(x.irrational_) * (sgn(x.radicand_) > 0 ? 1 : 0);
    if (sr == 0) {
      return sp;
    }
    if (sp == 0 || sp == sr) {
      return sr;
    }
    // Opposite signs: compare p^2 against r^2 d.
    const Rational lhs = x.rational_ * x.rational_;
    const Rational rhs = x.irrational_ * x.irrational_ * x.radicand_;
    const int c = cmp(lhs, rhs);
    return c > 0 ? sp : (c < 0 ? sr : 0);
  }

  friend double to_double(const QuadraticSurd& x);

 private:
  static Rational common(const QuadraticSurd& x, const QuadraticSurd& y) {
    if (sgn(x.radicand_) == 0) {
      return y.radicand_;
    }
    if (sgn(y.radicand_) != 0 && x.radicand_ != y.radicand_) {
      throw std::invalid_argument("mixing different quadratic fields");
    }
    return x.radicand_;
  }

  Rational rational_{0};
  Rational irrational_{0};
  Rational radicand_{0};
};

double to_double(const QuadraticSurd& x);

}  // namespace gibbstree
