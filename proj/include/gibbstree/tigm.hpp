#pragma once

/**
 * Translation-invariant fixed points of W and their classification.
 *
 * Case 1 works on I1 and reduces to one scalar equation; Case 2 works on I2
 * with k = 2 and reduces, after eliminating u2, to a product of four factors
 * in u1 = sqrt(z1). Root counts come from exact Sturm counts at rationalized
 * parameter values; numeric roots are then certified against W itself.
 */

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbstree/boundary_law.hpp"
#include "gibbstree/model.hpp"
#include "gibbstree/polynomial.hpp"
#include "gibbstree/rational.hpp"
#include "json.hpp"

namespace gibbstree {

// ---------------------------------------------------------------- Case 1 --

struct Case1Reduction {
  double A = 0.0;
  double B = 0.0;
  /// x = z * scale, scale = b + q - 2.
  double scale = 0.0;
};

Case1Reduction case1_reduce(const ModelParams& params);

/// Multiplicity threshold for general k; throws for k = 1 or alpha = 1.
double theta_c(int k, int q, double alpha);

/// (1 + 2 sqrt(q-1))^(1/(1-alpha)), the k = 2 threshold on theta_P.
double case1_k2_threshold(int q, double alpha);

struct EtaBounds {
  double x1 = 0.0;
  double x2 = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
};

/// Tangency points x1 < x2 of x^2 + [2 - (B-1)(k-1)]x + B and the values
/// eta_i = (1/x_i)((1+x_i)/(B+x_i))^k; empty when the quadratic has no two
/// positive roots.
std::optional<EtaBounds> eta_bounds(double B, int k);

/// A x (B + x)^k - (1 + x)^k.
template <OrderedField F>
Polynomial<F> case1_polynomial_x(const F& A, const F& B, int k) {
  const Polynomial<F> x({F(0), F(1)});
  const Polynomial<F> shifted_b({B, F(1)});
  const Polynomial<F> shifted_one({F(1), F(1)});
  return A * x * shifted_b.pow(static_cast<unsigned>(k)) - shifted_one.pow(static_cast<unsigned>(k));
}

/// z (z(q-1) + b)^k - (z(b+q-2) + 1)^k; z = 1 is always a root.
Polynomial<Rational> case1_polynomial_z(const Rational& b, int q, int k);

/// Positive roots z of the I1 equation, ascending, always including 1.
std::vector<double> solve_case1(const ModelParams& params, double tol = 1e-15);

struct Case1K2Roots {
  double delta = 0.0;
  /// z0 = 1 first, then z_1 >= z_2 when delta >= 0.
  std::vector<double> roots;
};

/// Explicit k = 2 roots; throws unless k = 2.
Case1K2Roots solve_case1_k2(const ModelParams& params);

// ---------------------------------------------------------------- Case 2 --

struct Case2Quartic {
  Rational a;
  Rational b;
  int q = 3;
  Rational A1, B1, C1, D1, E1;

  Polynomial<Rational> poly() const { return Polynomial<Rational>({E1, D1, C1, B1, A1}); }
};

Case2Quartic case2_quartic(const Rational& a, const Rational& b, int q);

struct U2Squared {
  double numerator = 0.0;
  double denominator = 0.0;
  bool singular = false;
  /// numerator / denominator unless singular.
  std::optional<double> value;
};

/// Back-substitution u2^2 from the first equation, constant term a^2 + 1.
U2Squared case2_u2_squared(double u1, double a, double b, int q);

/// [u - 1, (a^2(q-1)u - (b+q-2))^2, -(q-1)u^2 + (b-1)u - 1, quartic]; throws
/// for a = 1, where the quartic vanishes identically.
std::array<Polynomial<Rational>, 4> case2_factors(const Rational& a, const Rational& b, int q);

/// `derived` is f(u, a, a, 3) / (a-1)^2, with constant term
/// -((a+1)^5 + a^4 + a^2). `as_printed` keeps the published constant
/// -((a+1)^5 + a^2).
enum class QuarticForm { derived, as_printed };

std::string to_string(QuarticForm form);
QuarticForm parse_quartic_form(const std::string& text);

Polynomial<Rational> quartic_q3_equal(const Rational& a, QuarticForm form = QuarticForm::derived);

int count_quartic_positive_roots(const Rational& a, QuarticForm form = QuarticForm::derived);
int count_quartic_positive_roots(double a, QuarticForm form = QuarticForm::derived);

// --------------------------------------------------------- classification --

struct TigmSolution {
  /// trivial | linear_D | quadratic | quartic | case1_cubic, '+'-joined when
  /// several factors share the root.
  std::string source;
  /// {z} on I1, {z1, z2} on I2 (empty when z2 does not exist).
  std::vector<double> z;
  std::optional<double> u1;
  std::optional<double> u2;
  /// Largest relative residual of the two I2 equations.
  std::optional<double> system_residual;
  /// sup |W(z) - z| on the embedding.
  std::optional<double> fixed_point_residual;
  bool singular = false;
  bool valid = false;
  std::string note;

  /// Worst residual on record, +inf when nothing could be evaluated.
  double residual() const;
};

void to_json(nlohmann::json& j, const TigmSolution& s);

/// Validated fixed points have residuals at most this.
inline constexpr double kValidationTol = 1e-9;

/// Certifies a candidate u1 of the I2 system at params (k must be 2).
TigmSolution validate_case2_solution(const ModelParams& params, double u1);

struct PhaseClassification {
  std::string model_case;  // case1 | case2
  nlohmann::json point;
  std::string regime;
  int count = 0;
  int validated_count = 0;
  /// Exact distinct-root count at the rationalized point, when it differs
  /// in meaning from `count`.
  std::optional<int> exact_count;
  bool boundary_uncertain = false;
  std::vector<double> thresholds;
  std::vector<TigmSolution> solutions;
};

void to_json(nlohmann::json& j, const PhaseClassification& c);

PhaseClassification classify_case1(const ModelParams& params);

/// b = a, q = 3, k = 2. `params` supplies the model used for the W check;
/// it defaults to from_ab(3, 2, a, a).
PhaseClassification classify_case2_k2_q3(double a, double dedup_tol = 1e-9,
                                         QuarticForm form = QuarticForm::derived);
PhaseClassification classify_case2_k2_q3(const ModelParams& params, double dedup_tol = 1e-9,
                                         QuarticForm form = QuarticForm::derived);

// -------------------------------------------------------------- thresholds --

struct Threshold {
  double at = 0.0;
  int below = 0;
  /// Count at the located point; only filled by the Case-2 event search.
  std::optional<int> at_count;
  int above = 0;
};

void to_json(nlohmann::json& j, const Threshold& t);

/// Grid scan with `steps` cells followed by bisection of every cell whose
/// endpoints disagree, down to width tol.
std::vector<Threshold> find_thresholds(const std::function<int(double)>& classifier, double lo, double hi,
                                       double tol = 1e-4, int steps = 1000);

/// Every a in (lo, hi) where the Case-2 root count is not locally constant,
/// including isolated points where two factors share a root. Candidates are
/// the positive roots of exact event polynomials in a (resultants and
/// discriminants of the factors), kept when the count changes there.
std::vector<Threshold> find_case2_critical_points(double lo, double hi, double tol = 1e-4,
                                                  QuarticForm form = QuarticForm::derived);

}  // namespace gibbstree
