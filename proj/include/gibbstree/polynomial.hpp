#pragma once

/**
 * Dense univariate polynomials over an exact ordered field.
 *
 * Coefficients are stored constant term first and the vector is kept trimmed,
 * so `degree()` is always the index of the last nonzero coefficient and the
 * zero polynomial has an empty coefficient vector (degree -1).
 */

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gibbstree/rational.hpp"

namespace gibbstree {

template <typename T>
concept OrderedField = requires(T a, T b) {
  { T(0) };
  { T(1) };
  { T(a + b) };
  { T(a - b) };
  { T(a * b) };
  { T(a / b) };
  { T(-a) };
  { a == b } -> std::convertible_to<bool>;
  { sign(a) } -> std::convertible_to<int>;
  { to_double(a) } -> std::convertible_to<double>;
};

template <OrderedField F = Rational>
class Polynomial {
 public:
  using coefficient_type = F;

  Polynomial() = default;

  explicit Polynomial(std::vector<F> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  Polynomial(std::initializer_list<F> coeffs) : coeffs_(coeffs) { trim(); }

  static Polynomial constant(const F& c) { return Polynomial(std::vector<F>{c}); }

  static Polynomial monomial(const F& c, int degree) {
    std::vector<F> coeffs(static_cast<std::size_t>(degree) + 1, F(0));
    coeffs.back() = c;
    return Polynomial(std::move(coeffs));
  }

  /// x - r
  static Polynomial linear_root(const F& r) { return Polynomial({F(-r), F(1)}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<F>& coeffs() const { return coeffs_; }

  /// Coefficient of x^i; zero beyond the degree.
  F coefficient(int i) const {
    return i >= 0 && i <= degree() ? coeffs_[static_cast<std::size_t>(i)] : F(0);
  }

  const F& leading() const {
    if (is_zero()) {
      throw std::domain_error("leading coefficient of the zero polynomial");
    }
    return coeffs_.back();
  }

  F operator()(const F& x) const {
    F acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = F(acc * x + *it);
    }
    return acc;
  }

  double evaluate(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = acc * x + to_double(*it);
    }
    return acc;
  }

  Polynomial derivative() const {
    if (degree() < 1) {
      return {};
    }
    std::vector<F> out;
    out.reserve(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
      out.push_back(F(coeffs_[i] * F(static_cast<long>(i))));
    }
    return Polynomial(std::move(out));
  }

  Polynomial monic() const {
    if (is_zero()) {
      return {};
    }
    return *this * F(F(1) / leading());
  }

  Polynomial operator-() const {
    std::vector<F> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) {
      out.push_back(F(-c));
    }
    return Polynomial(std::move(out));
  }

  friend Polynomial operator+(const Polynomial& p, const Polynomial& r) {
    std::vector<F> out(std::max(p.coeffs_.size(), r.coeffs_.size()), F(0));
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = F(p.coefficient(static_cast<int>(i)) + r.coefficient(static_cast<int>(i)));
    }
    return Polynomial(std::move(out));
  }

  friend Polynomial operator-(const Polynomial& p, const Polynomial& r) { return p + (-r); }

  friend Polynomial operator*(const Polynomial& p, const Polynomial& r) {
    if (p.is_zero() || r.is_zero()) {
      return {};
    }
    std::vector<F> out(p.coeffs_.size() + r.coeffs_.size() - 1, F(0));
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
      for (std::size_t j = 0; j < r.coeffs_.size(); ++j) {
        out[i + j] = F(out[i + j] + p.coeffs_[i] * r.coeffs_[j]);
      }
    }
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const Polynomial& p, const F& c) {
    std::vector<F> out;
    out.reserve(p.coeffs_.size());
    for (const auto& x : p.coeffs_) {
      out.push_back(F(x * c));
    }
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const F& c, const Polynomial& p) { return p * c; }

  friend bool operator==(const Polynomial& p, const Polynomial& r) { return p.coeffs_ == r.coeffs_; }

  Polynomial pow(unsigned exponent) const {
    Polynomial result = constant(F(1));
    Polynomial base = *this;
    while (exponent != 0) {
      if (exponent & 1U) {
        result = result * base;
      }
      base = base * base;
      exponent >>= 1U;
    }
    return result;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && sign(coeffs_.back()) == 0) {
      coeffs_.pop_back();
    }
  }

  std::vector<F> coeffs_;
};

template <OrderedField F>
struct DivRem {
  Polynomial<F> quotient;
  Polynomial<F> remainder;
};

/// Euclidean division p = quotient * d + remainder with deg(remainder) < deg(d).
template <OrderedField F>
DivRem<F> divrem(const Polynomial<F>& p, const Polynomial<F>& d) {
  if (d.is_zero()) {
    throw std::domain_error("polynomial division by zero");
  }
  if (p.degree() < d.degree()) {
    return {Polynomial<F>{}, p};
  }
  std::vector<F> rem = p.coeffs();
  std::vector<F> quot(static_cast<std::size_t>(p.degree() - d.degree()) + 1, F(0));
  const F& lead = d.leading();
  const auto dd = static_cast<std::size_t>(d.degree());
  for (std::size_t shift = quot.size(); shift-- > 0;) {
    F c = F(rem[shift + dd] / lead);
    quot[shift] = c;
    if (sign(c) == 0) {
      continue;
    }
    for (std::size_t i = 0; i <= dd; ++i) {
      rem[shift + i] = F(rem[shift + i] - c * d.coeffs()[i]);
    }
  }
  rem.resize(dd);
  return {Polynomial<F>(std::move(quot)), Polynomial<F>(std::move(rem))};
}

/// Monic greatest common divisor; gcd(0, 0) is the zero polynomial.
template <OrderedField F>
Polynomial<F> gcd(Polynomial<F> p, Polynomial<F> r) {
  while (!r.is_zero()) {
    auto step = divrem(p, r);
    p = std::move(r);
    r = std::move(step.remainder);
  }
  return p.monic();
}

/// p / gcd(p, p'), keeping p's scale. A square-free p comes back unchanged.
template <OrderedField F>
Polynomial<F> square_free_part(const Polynomial<F>& p) {
  if (p.is_zero()) {
    throw std::domain_error("square-free part of the zero polynomial");
  }
  const auto g = gcd(p, p.derivative());
  if (g.degree() <= 0) {
    return p;
  }
  return divrem(p, g).quotient;
}

/// Resultant by the Euclidean recurrence
/// res(p, r) = (-1)^{deg p deg r} lc(r)^{deg p - deg(p mod r)} res(r, p mod r).
template <OrderedField F>
F resultant(Polynomial<F> p, Polynomial<F> r) {
  if (p.is_zero() || r.is_zero()) {
    return F(0);
  }
  F acc(1);
  while (r.degree() > 0) {
    const int dp = p.degree();
    const int dr = r.degree();
    auto rem = divrem(p, r).remainder;
    if (rem.is_zero()) {
      return F(0);
    }
    if ((dp * dr) % 2 != 0) {
      acc = F(-acc);
    }
    for (int i = 0; i < dp - rem.degree(); ++i) {
      acc = F(acc * r.leading());
    }
    p = std::move(r);
    r = std::move(rem);
  }
  // r is a nonzero constant: res(p, c) = c^{deg p}.
  for (int i = 0; i < p.degree(); ++i) {
    acc = F(acc * r.leading());
  }
  return acc;
}

/// Compose p(q(x)).
template <OrderedField F>
Polynomial<F> compose(const Polynomial<F>& p, const Polynomial<F>& q) {
  Polynomial<F> acc;
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc = acc * q + Polynomial<F>::constant(*it);
  }
  return acc;
}

}  // namespace gibbstree
