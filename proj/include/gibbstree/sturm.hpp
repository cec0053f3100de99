#pragma once

/**
 * Real-root counting and isolation for exact polynomials.
 *
 * Every count is the number of *distinct* real roots: chains are built on the
 * square-free part, and multiplicities are recovered separately from the
 * sequence of repeated gcds with the derivative.
 */

#include <stdexcept>
#include <utility>
#include <vector>

#include "gibbstree/polynomial.hpp"

namespace gibbstree {

/// A point of the extended real line with an exact finite part.
template <OrderedField F = Rational>
class ExtendedPoint {
 public:
  enum class Kind { finite, plus_infinity, minus_infinity };

  ExtendedPoint(const F& value) : kind_(Kind::finite), value_(value) {}  // NOLINT(implicit)

  static ExtendedPoint plus_infinity() { return ExtendedPoint(Kind::plus_infinity); }
  static ExtendedPoint minus_infinity() { return ExtendedPoint(Kind::minus_infinity); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  const F& value() const { return value_; }

 private:
  explicit ExtendedPoint(Kind kind) : kind_(kind), value_(0) {}

  Kind kind_;
  F value_;
};

/// Sign of p at an extended point; at ±inf the sign of the leading term.
template <OrderedField F>
int sign_at(const Polynomial<F>& p, const ExtendedPoint<F>& at) {
  if (p.is_zero()) {
    return 0;
  }
  switch (at.kind()) {
    case ExtendedPoint<F>::Kind::finite:
      return sign(p(at.value()));
    case ExtendedPoint<F>::Kind::plus_infinity:
      return sign(p.leading());
    case ExtendedPoint<F>::Kind::minus_infinity:
      return p.degree() % 2 == 0 ? sign(p.leading()) : -sign(p.leading());
  }
  return 0;
}

template <OrderedField F = Rational>
class SturmChain {
 public:
  /// P0 = square-free part of p, P1 = P0', P_{i+1} = -rem(P_{i-1}, P_i).
  explicit SturmChain(const Polynomial<F>& p) {
    if (p.is_zero()) {
      throw std::domain_error("Sturm chain of the zero polynomial");
    }
    chain_.push_back(square_free_part(p));
    auto next = chain_.front().derivative();
    while (!next.is_zero()) {
      chain_.push_back(std::move(next));
      const auto& last = chain_[chain_.size() - 1];
      const auto& before = chain_[chain_.size() - 2];
      next = -divrem(before, last).remainder;
    }
  }

  const std::vector<Polynomial<F>>& polys() const { return chain_; }
  std::size_t size() const { return chain_.size(); }
  const Polynomial<F>& operator[](std::size_t i) const { return chain_[i]; }

 private:
  std::vector<Polynomial<F>> chain_;
};

template <OrderedField F>
SturmChain<F> sturm_chain(const Polynomial<F>& p) {
  return SturmChain<F>(p);
}

/// Strict sign alternations along the chain at `at`, zeros skipped.
template <OrderedField F>
int sign_changes(const SturmChain<F>& chain, const ExtendedPoint<F>& at) {
  int changes = 0;
  int previous = 0;
  for (const auto& poly : chain.polys()) {
    const int s = sign_at(poly, at);
    if (s == 0) {
      continue;
    }
    if (previous != 0 && s != previous) {
      ++changes;
    }
    previous = s;
  }
  return changes;
}

/// Distinct real roots of the chain's polynomial in (lo, hi].
template <OrderedField F>
int count_roots(const SturmChain<F>& chain, const ExtendedPoint<F>& lo, const ExtendedPoint<F>& hi) {
  return sign_changes(chain, lo) - sign_changes(chain, hi);
}

template <OrderedField F>
int count_roots(const Polynomial<F>& p, const ExtendedPoint<F>& lo, const ExtendedPoint<F>& hi) {
  return count_roots(SturmChain<F>(p), lo, hi);
}

/// Distinct positive roots, i.e. the count on (0, +inf).
template <OrderedField F>
int count_positive_roots(const Polynomial<F>& p) {
  return count_roots(p, ExtendedPoint<F>(F(0)), ExtendedPoint<F>::plus_infinity());
}

/// Sign variations of the coefficient sequence (Descartes' rule of signs).
template <OrderedField F>
int descartes_positive_bound(const Polynomial<F>& p) {
  if (p.is_zero()) {
    throw std::domain_error("Descartes bound of the zero polynomial");
  }
  int variations = 0;
  int previous = 0;
  for (const auto& c : p.coeffs()) {
    const int s = sign(c);
    if (s == 0) {
      continue;
    }
    if (previous != 0 && s != previous) {
      ++variations;
    }
    previous = s;
  }
  return variations;
}

/// Cauchy bound 1 + max |a_i / a_n|: every real root lies strictly inside it.
template <OrderedField F>
F cauchy_bound(const Polynomial<F>& p) {
  if (p.degree() < 1) {
    return F(1);
  }
  F best(0);
  for (int i = 0; i < p.degree(); ++i) {
    F ratio = F(p.coefficient(i) / p.leading());
    if (sign(ratio) < 0) {
      ratio = F(-ratio);
    }
    if (sign(F(ratio - best)) > 0) {
      best = ratio;
    }
  }
  return F(best + F(1));
}

template <OrderedField F = Rational>
struct RootInterval {
  F lo;
  F hi;
  int multiplicity = 1;

  bool exact() const { return lo == hi; }
  double midpoint() const { return to_double(F((lo + hi) / F(2))); }
};

namespace detail {

template <OrderedField F>
int root_multiplicity(const std::vector<Polynomial<F>>& gcd_tower, const F& lo, const F& hi) {
  int m = 0;
  for (const auto& g : gcd_tower) {
    if (g.degree() < 1) {
      break;
    }
    int here = 0;
    if (lo == hi) {
      here = sign(g(lo)) == 0 ? 1 : 0;
    } else {
      here = count_roots(g, ExtendedPoint<F>(lo), ExtendedPoint<F>(hi));
    }
    if (here == 0) {
      break;
    }
    ++m;
  }
  return m;
}

}  // namespace detail

/**
 * Isolates every distinct real root in (lo, hi] and shrinks each isolating
 * interval to width <= tol. Infinite ends are replaced by the Cauchy bound.
 * Intervals come back sorted, pairwise disjoint, each with its multiplicity;
 * an exact rational root is reported as lo == hi.
 */
template <OrderedField F>
std::vector<RootInterval<F>> isolate_and_refine(const Polynomial<F>& p, const ExtendedPoint<F>& lo,
                                                const ExtendedPoint<F>& hi, const F& tol) {
  if (p.is_zero()) {
    throw std::domain_error("root isolation of the zero polynomial");
  }
  if (sign(tol) <= 0) {
    throw std::invalid_argument("root isolation tolerance must be positive");
  }
  std::vector<RootInterval<F>> out;
  if (p.degree() < 1) {
    return out;
  }
  const SturmChain<F> chain(p);
  const auto& base = chain[0];
  const F bound = cauchy_bound(base);
  auto clamp = [&](const ExtendedPoint<F>& x) -> F {
    switch (x.kind()) {
      case ExtendedPoint<F>::Kind::plus_infinity:
        return bound;
      case ExtendedPoint<F>::Kind::minus_infinity:
        return F(-bound);
      default:
        return x.value();
    }
  };
  F left = clamp(lo);
  F right = clamp(hi);
  if (sign(F(right - left)) <= 0) {
    return out;
  }

  std::vector<Polynomial<F>> gcd_tower{p};
  while (gcd_tower.back().degree() >= 1) {
    gcd_tower.push_back(gcd(gcd_tower.back(), gcd_tower.back().derivative()));
  }

  const F two(2);
  auto count = [&](const F& a, const F& b) {
    return count_roots(chain, ExtendedPoint<F>(a), ExtendedPoint<F>(b));
  };

  auto emit = [&](F a, F b) {
    // One root in (a, b]; shrink by sign bisection on the square-free part.
    if (sign(base(b)) == 0) {
      a = b;
    }
    while (!(a == b) && sign(F(b - a - tol)) > 0) {
      F mid = F((a + b) / two);
      const int s_mid = sign(base(mid));
      if (s_mid == 0) {
        a = mid;
        b = mid;
        break;
      }
      if (count(a, mid) == 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back({a, b, detail::root_multiplicity(gcd_tower, a, b)});
  };

  // Depth-first bisection over (a, b] with known counts.
  std::vector<std::pair<F, F>> stack{{left, right}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const int n = count(a, b);
    if (n == 0) {
      continue;
    }
    if (n == 1) {
      emit(a, b);
      continue;
    }
    F mid = F((a + b) / two);
    stack.emplace_back(mid, b);
    stack.emplace_back(a, mid);
  }
  std::sort(out.begin(), out.end(),
            [](const RootInterval<F>& x, const RootInterval<F>& y) { return sign(F(y.lo - x.lo)) > 0; });
  return out;
}

}  // namespace gibbstree
