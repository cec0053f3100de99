#include "gibbstree/tigm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gibbstree/sturm.hpp"

namespace gibbstree {

namespace {

using Poly = Polynomial<Rational>;

Rational rpow(const Rational& x, int n) {
  Rational acc(1);
  for (int i = 0; i < n; ++i) {
    acc *= x;
  }
  return acc;
}

Rational rational_tolerance(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("tolerance must be positive and finite");
  }
  return rationalize(tol);
}

/// Positive roots of p as (midpoint, exact) pairs.
std::vector<double> positive_roots(const Poly& p, const Rational& tol) {
  std::vector<double> out;
  if (p.degree() < 1) {
    return out;
  }
  for (const auto& r : isolate_and_refine(p, ExtendedPoint<Rational>(Rational(0)),
                                          ExtendedPoint<Rational>::plus_infinity(), tol)) {
    out.push_back(r.midpoint());
  }
  return out;
}

bool close_relative(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y)); }

std::string case1_source(int k) { return k == 2 ? "case1_cubic" : "case1_poly"; }

}  // namespace

// ---------------------------------------------------------------- Case 1 --

Case1Reduction case1_reduce(const ModelParams& params) {
  params.validate();
  const double b = params.b();
  const double q1 = params.q - 1.0;
  const double scale = b + params.q - 2.0;
  return {std::pow(q1, params.k) / std::pow(scale, params.k + 1), b * scale / q1, scale};
}

double theta_c(int k, int q, double alpha) {
  if (k < 2) {
    throw std::invalid_argument("theta_c needs k >= 2");
  }
  if (q < 3) {
    throw std::invalid_argument("theta_c needs q >= 3");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("theta_c needs alpha in [0, 1)");
  }
  const double km = k - 1.0;
  const double qm = q - 2.0;
  const double root = std::sqrt(qm * qm * km * km + 4.0 * (q - 1.0) * (k + 1.0) * (k + 1.0));
  return std::pow((root - qm * km) / (2.0 * km), 1.0 / (1.0 - alpha));
}

double case1_k2_threshold(int q, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("the k = 2 threshold needs alpha in [0, 1)");
  }
  return std::pow(1.0 + 2.0 * std::sqrt(q - 1.0), 1.0 / (1.0 - alpha));
}

std::optional<EtaBounds> eta_bounds(double B, int k) {
  if (!(B > 0.0) || k < 2) {
    return std::nullopt;
  }
  const double s = (B - 1.0) * (k - 1.0) - 2.0;  // sum of the roots
  const double disc = s * s - 4.0 * B;
  if (disc < 0.0 || s <= 0.0) {
    return std::nullopt;
  }
  const double big = (s + std::sqrt(disc)) / 2.0;
  const double small = B / big;
  auto eta = [&](double x) { return std::pow((1.0 + x) / (B + x), k) / x; };
  EtaBounds out{small, big, eta(small), eta(big)};
  if (out.eta1 > out.eta2) {
    std::swap(out.x1, out.x2);
    std::swap(out.eta1, out.eta2);
  }
  return out;
}

Poly case1_polynomial_z(const Rational& b, int q, int k) {
  if (k < 1) {
    throw std::invalid_argument("k must be positive");
  }
  const Poly z({Rational(0), Rational(1)});
  const Poly inner({b, Rational(q - 1)});
  const Poly outer({Rational(1), Rational(b + q - 2)});
  return z * inner.pow(static_cast<unsigned>(k)) - outer.pow(static_cast<unsigned>(k));
}

std::vector<double> solve_case1(const ModelParams& params, double tol) {
  params.validate();
  const Rational b = rationalize_near(params.b());
  const Poly p = case1_polynomial_z(b, params.q, params.k);
  const auto split = divrem(p, Poly::linear_root(Rational(1)));
  std::vector<double> roots = positive_roots(split.quotient, rational_tolerance(tol));
  // z = 1 is exact; a cofactor root there is the same solution.
  std::erase_if(roots, [&](double z) { return std::abs(z - 1.0) <= 4.0 * tol; });
  roots.push_back(1.0);
  std::sort(roots.begin(), roots.end());
  return roots;
}

Case1K2Roots solve_case1_k2(const ModelParams& params) {
  params.validate();
  if (params.k != 2) {
    throw std::invalid_argument("explicit Case-1 roots need k = 2");
  }
  const double b = params.b();
  const double q1 = params.q - 1.0;
  Case1K2Roots out;
  out.delta = (b - 1.0) * (b - 1.0) - 4.0 * q1;
  out.roots.push_back(1.0);
  if (out.delta >= 0.0) {
    const double base = (b - 1.0) * (b - 1.0) - 2.0 * q1;
    const double spread = std::abs(b - 1.0) * std::sqrt(out.delta);
    const double denom = 2.0 * q1 * q1;
    const double z1 = (base + spread) / denom;
    out.roots.push_back(z1);
    // The product of the pair is 1/(q-1)^2; dividing avoids cancellation.
    out.roots.push_back(spread == 0.0 ? z1 : 1.0 / (q1 * q1 * z1));
  }
  return out;
}

// ---------------------------------------------------------------- Case 2 --

Case2Quartic case2_quartic(const Rational& a, const Rational& b, int q) {
  const Rational Q(q);
  const Rational a2 = a * a;
  const Rational a4 = a2 * a2;
  const Rational a6 = a4 * a2;
  const Rational m = a2 - 1;
  const Rational s = b + Q - 2;
  Case2Quartic f{a, b, q, 0, 0, 0, 0, 0};
  f.A1 = -(Q - 1) * (Q - 1) * s * s * m * m;
  f.B1 = (Q - 1) * s * s * s * m * m * m;
  f.C1 = -s * m *
         (m * b * b * b + ((Q - 1) * a4 + (2 * Q - 5) * a2 - 5 * Q + 8) * b * b +
          ((Q * Q - 3 * Q + 2) * a4 + (2 * Q * Q - 9 * Q + 10) * a2 - 5 * Q * Q + 18 * Q - 16) * b +
          (Q * Q * Q - 4 * Q * Q + 8 * Q - 6) * a2 - Q * Q * Q + 6 * Q * Q - 12 * Q + 8);
  // One power of (a^2 - 1), not two: the elimination gives this, and only
  // this makes f(u, a, a, 3) divisible by (a - 1)^2.
  f.D1 = s * s * m * ((a2 + 1) * b * b + (Q - 2) * (a2 + 1) * b + a2 * (a2 - 3) * (Q - 1));
  const Rational q2 = Q - 2;
  f.E1 = -(a2 + 1) * b * b * b * b + (-a4 + (-2 * Q + 6) * a2 - 2 * Q + 3) * b * b * b +
         ((-Q + 4) * a4 + (-Q * Q + 12 * Q - 18) * a2 - Q * Q + Q + 2) * b * b -
         q2 * ((Q - 4) * a4 - 2 * (4 * Q - 7) * a2 + 3 * q2) * b - (Q - 1) * (Q - 1) * a6 +
         (-Q * Q * Q + 5 * Q * Q - 10 * Q + 7) * a4 + 2 * q2 * q2 * q2 * a2 - q2 * q2 * q2;
  return f;
}

U2Squared case2_u2_squared(double u1, double a, double b, int q) {
  const double a2 = a * a;
  const double q1 = q - 1.0;
  const double s = q + b - 2.0;
  U2Squared out;
  out.numerator = -q1 * u1 * u1 * u1 + a2 * s * u1 * u1 - (a2 + 1.0) * b * u1 + a2 + 1.0;
  out.denominator = a2 * q1 * u1 - s;
  const double scale = std::max({std::abs(a2 * q1 * u1), std::abs(s), 1.0});
  out.singular = std::abs(out.denominator) <= 1e-12 * scale;
  if (!out.singular) {
    out.value = out.numerator / out.denominator;
  }
  return out;
}

std::array<Poly, 4> case2_factors(const Rational& a, const Rational& b, int q) {
  if (a == 1) {
    throw std::invalid_argument("a = 1 is degenerate: I2 collapses onto I1 and the quartic vanishes");
  }
  if (sgn(a) <= 0 || sgn(b) <= 0) {
    throw std::invalid_argument("a and b must be positive");
  }
  const Rational q1(q - 1);
  const Poly linear({-(b + q - 2), a * a * q1});
  return {Poly::linear_root(Rational(1)), linear * linear, Poly({Rational(-1), Rational(b - 1), Rational(-q1)}),
          case2_quartic(a, b, q).poly()};
}

std::string to_string(QuarticForm form) { return form == QuarticForm::derived ? "derived" : "as_printed"; }

QuarticForm parse_quartic_form(const std::string& text) {
  if (text == "derived") {
    return QuarticForm::derived;
  }
  if (text == "as_printed" || text == "printed") {
    return QuarticForm::as_printed;
  }
  throw std::invalid_argument("quartic form must be 'derived' or 'as_printed'");
}

Poly quartic_q3_equal(const Rational& a, QuarticForm form) {
  if (sgn(a) <= 0) {
    throw std::invalid_argument("a must be positive");
  }
  const Rational p = a + 1;
  const Rational a2 = a * a;
  Rational constant = -(rpow(p, 5) + a2);
  if (form == QuarticForm::derived) {
    constant -= a2 * a2;
  }
  return Poly({constant, a * (3 * a2 + 4 * a - 1) * rpow(p, 3),
               -p * p * (2 * rpow(a, 5) + 5 * a2 * a2 + 6 * a2 * a + 6 * a2 + 8 * a + 1), 2 * (a - 1) * rpow(p, 6),
               -4 * rpow(p, 4)});
}

int count_quartic_positive_roots(const Rational& a, QuarticForm form) {
  return count_positive_roots(quartic_q3_equal(a, form));
}

int count_quartic_positive_roots(double a, QuarticForm form) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("a must be positive and finite");
  }
  return count_quartic_positive_roots(rationalize_near(a), form);
}

// --------------------------------------------------------- classification --

double TigmSolution::residual() const {
  if (singular || (!system_residual && !fixed_point_residual)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(system_residual.value_or(0.0), fixed_point_residual.value_or(0.0));
}

void to_json(nlohmann::json& j, const TigmSolution& s) {
  j = nlohmann::json{{"source", s.source}, {"z", s.z}, {"residual", s.residual()}, {"valid", s.valid}};
  if (s.u1) {
    j["u1"] = *s.u1;
  }
  if (s.u2) {
    j["u2"] = *s.u2;
  }
  if (s.system_residual) {
    j["system_residual"] = *s.system_residual;
  }
  if (s.fixed_point_residual) {
    j["fixed_point_residual"] = *s.fixed_point_residual;
  }
  if (s.singular) {
    j["singular"] = true;
  }
  if (!s.note.empty()) {
    j["note"] = s.note;
  }
}

void to_json(nlohmann::json& j, const PhaseClassification& c) {
  j = nlohmann::json{{"case", c.model_case},
                     {"point", c.point},
                     {"regime", c.regime},
                     {"count", c.count},
                     {"validated_count", c.validated_count},
                     {"boundary_uncertain", c.boundary_uncertain},
                     {"thresholds", c.thresholds},
                     {"solutions", c.solutions}};
  if (c.exact_count) {
    j["exact_count"] = *c.exact_count;
  }
}

void to_json(nlohmann::json& j, const Threshold& t) {
  j = nlohmann::json{{"at", t.at}, {"below", t.below}, {"above", t.above}};
  if (t.at_count) {
    j["at_count"] = *t.at_count;
  }
}

TigmSolution validate_case2_solution(const ModelParams& params, double u1) {
  params.validate();
  if (params.k != 2) {
    throw std::invalid_argument("the I2 system is stated for k = 2");
  }
  if (!(u1 > 0.0) || !std::isfinite(u1)) {
    throw std::invalid_argument("u1 must be positive and finite");
  }
  const double a = params.a();
  const double b = params.b();
  const int q = params.q;
  TigmSolution out;
  out.u1 = u1;
  const U2Squared u2sq = case2_u2_squared(u1, a, b, q);
  if (u2sq.singular) {
    out.singular = true;
    out.note = "back-substitution denominator vanishes; numerator = " + nlohmann::json(u2sq.numerator).dump();
    return out;
  }
  if (!(*u2sq.value > 0.0)) {
    out.note = "u2^2 = " + nlohmann::json(*u2sq.value).dump() + " is not positive";
    return out;
  }
  const double u2 = std::sqrt(*u2sq.value);
  out.u2 = u2;
  const double z1 = u1 * u1;
  const double z2 = u2 * u2;
  out.z = {z1, z2};

  // Both equations of the u-system, each scaled by a.
  const double a2 = a * a;
  const double s = q + b - 2.0;
  const double bracket = (z1 + a2 * z2) * (q - 1.0) + b * (a2 + 1.0);
  const double lhs1 = u1 * bracket;
  const double rhs1 = (a2 * z1 + z2) * s + a2 + 1.0;
  const double lhs2 = u2 * bracket;
  const double rhs2 = (z1 + a2 * z2) * s + a2 + 1.0;
  const double r1 = std::abs(lhs1 - rhs1) / std::max({1.0, std::abs(lhs1), std::abs(rhs1)});
  const double r2 = std::abs(lhs2 - rhs2) / std::max({1.0, std::abs(lhs2), std::abs(rhs2)});
  out.system_residual = std::max(r1, r2);

  const auto fp = is_fixed_point(params, embed_I2(q, z1, z2), kValidationTol);
  out.fixed_point_residual = fp.residual;
  out.valid = *out.system_residual <= kValidationTol && fp.fixed;
  if (*out.system_residual <= kValidationTol && !fp.fixed) {
    const BoundaryField image = apply_W(params, embed_I2(q, z1, z2));
    out.note = "solves the two-equation system but W moves z_{1,q} to " + nlohmann::json(image(1, q)).dump();
  }
  return out;
}

PhaseClassification classify_case1(const ModelParams& params) {
  params.validate();
  PhaseClassification out;
  out.model_case = "case1";
  out.point = params;
  out.point["theta_P"] = params.theta_P();
  out.point["b"] = params.b();

  const int k = params.k;
  const int q = params.q;
  const double b = params.b();
  std::vector<double> roots = solve_case1(params);
  const int exact = static_cast<int>(roots.size());
  out.exact_count = exact;

  if (k == 2) {
    const double edge = 1.0 + 2.0 * std::sqrt(q - 1.0);
    if (params.alpha < 1.0) {
      out.thresholds = {case1_k2_threshold(q, params.alpha)};
    }
    if (std::abs(b - edge) <= 1e-12 * edge) {
      out.boundary_uncertain = true;
      out.count = 2;
      out.regime = "critical";
      // Collapse the near-double pair (or supply it when the rationalized
      // point fell just below) to the tangency root.
      const double q1 = q - 1.0;
      const double z_double = ((b - 1.0) * (b - 1.0) - 2.0 * q1) / (2.0 * q1 * q1);
      roots = {z_double, 1.0};
      std::sort(roots.begin(), roots.end());
    } else if (b > edge) {
      out.count = 3;
      out.regime = "phase_transition";
    } else {
      out.count = 1;
      out.regime = "uniqueness";
    }
  } else {
    const bool unique = k == 1 || params.alpha >= 1.0 || params.theta_P() <= theta_c(k, q, params.alpha);
    if (k >= 2 && params.alpha < 1.0) {
      out.thresholds = {theta_c(k, q, params.alpha)};
    }
    out.count = unique ? 1 : exact;
    out.regime = unique ? "uniqueness" : (exact > 1 ? "phase_transition" : "uniqueness");
    if (const auto eta = eta_bounds(case1_reduce(params).B, k); eta && !unique) {
      const double A = case1_reduce(params).A;
      const std::string where = A < eta->eta1 ? "A<eta1" : (A > eta->eta2 ? "A>eta2" : "eta1<=A<=eta2");
      out.regime += " (" + where + ")";
    }
  }

  for (double z : roots) {
    TigmSolution s;
    s.source = z == 1.0 ? "trivial" : case1_source(k);
    s.z = {z};
    const auto fp = is_fixed_point(params, embed_I1(q, z), kValidationTol);
    s.fixed_point_residual = fp.residual;
    s.valid = fp.fixed;
    out.solutions.push_back(std::move(s));
  }
  out.validated_count =
      static_cast<int>(std::count_if(out.solutions.begin(), out.solutions.end(), [](const auto& s) { return s.valid; }));
  if (!out.boundary_uncertain && k == 2 && exact != out.count) {
    // Off the threshold this only happens at b = q + 1, where the quadratic
    // factor passes through z = 1.
    for (auto& s : out.solutions) {
      if (s.z.front() == 1.0) {
        s.note = "z = 1 is a double root here";
      }
    }
  }
  return out;
}

namespace {

struct Case2Root {
  double u = 0.0;
  std::string source;
};

std::vector<Poly> case2_factor_list(const Rational& a, QuarticForm form) {
  auto f = case2_factors(a, a, 3);
  f[3] = quartic_q3_equal(a, form);
  return {f.begin(), f.end()};
}

/// Positive roots of every factor, sorted, merged within the relative tolerance.
std::vector<Case2Root> case2_roots(const Rational& a, QuarticForm form, double dedup_tol) {
  static const char* kSources[] = {"trivial", "linear_D", "quadratic", "quartic"};
  const auto factors = case2_factor_list(a, form);
  const Rational tol(mpz_class(1), mpz_class(1) << 60);
  std::vector<Case2Root> raw;
  raw.push_back({1.0, kSources[0]});
  raw.push_back({Rational((a + 1) / (2 * a * a)).get_d(), kSources[1]});
  for (int i = 2; i < 4; ++i) {
    for (double u : positive_roots(factors[static_cast<std::size_t>(i)], tol)) {
      raw.push_back({u, kSources[i]});
    }
  }
  std::stable_sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) { return x.u < y.u; });
  std::vector<Case2Root> merged;
  for (auto& r : raw) {
    if (!merged.empty() && close_relative(merged.back().u, r.u, dedup_tol)) {
      merged.back().source += "+" + r.source;
      continue;
    }
    merged.push_back(std::move(r));
  }
  return merged;
}

int case2_exact_count(const Rational& a, QuarticForm form) {
  const auto f = case2_factor_list(a, form);
  return count_positive_roots(f[0] * square_free_part(f[1]) * f[2] * f[3]);
}

int case2_count(double a, QuarticForm form, double dedup_tol = 1e-9) {
  const Rational ar = rationalize_near(a);
  if (ar == 1) {
    return 1;
  }
  return static_cast<int>(case2_roots(ar, form, dedup_tol).size());
}

const std::vector<double>& case2_thresholds_cached(QuarticForm form) {
  static std::mutex guard;
  static std::map<QuarticForm, std::vector<double>> cache;
  std::lock_guard lock(guard);
  auto it = cache.find(form);
  if (it == cache.end()) {
    std::vector<double> at;
    for (const auto& t : find_case2_critical_points(1.0 + 1e-6, 20.0, 1e-9, form)) {
      at.push_back(t.at);
    }
    it = cache.emplace(form, std::move(at)).first;
  }
  return it->second;
}

}  // namespace

PhaseClassification classify_case2_k2_q3(double a, double dedup_tol, QuarticForm form) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("a must be positive and finite");
  }
  return classify_case2_k2_q3(ModelParams::from_ab(3, 2, a, a, 0.5), dedup_tol, form);
}

PhaseClassification classify_case2_k2_q3(const ModelParams& params, double dedup_tol, QuarticForm form) {
  params.validate();
  if (params.q != 3 || params.k != 2) {
    throw std::invalid_argument("this Case-2 classifier needs q = 3 and k = 2");
  }
  const double a = params.a();
  if (!close_relative(a, params.b(), 1e-12)) {
    throw std::invalid_argument("this Case-2 classifier needs equal couplings (b = a)");
  }
  if (!(dedup_tol > 0.0)) {
    throw std::invalid_argument("dedup tolerance must be positive");
  }
  const Rational ar = rationalize_near(a);
  if (ar == 1) {
    PhaseClassification out = classify_case1(params);
    out.model_case = "case2";
    out.regime += " (a = 1: I2 collapses onto I1)";
    return out;
  }
  PhaseClassification out;
  out.model_case = "case2";
  out.point = params;
  out.point["a"] = a;
  out.point["b"] = params.b();
  out.point["quartic_form"] = to_string(form);

  const auto roots = case2_roots(ar, form, dedup_tol);
  out.count = static_cast<int>(roots.size());
  out.exact_count = case2_exact_count(ar, form);
  out.boundary_uncertain = *out.exact_count != out.count;
  out.regime = std::to_string(out.count) + " roots";
  if (a > 1.0) {
    out.thresholds = case2_thresholds_cached(form);
  }
  for (const auto& r : roots) {
    TigmSolution s = validate_case2_solution(params, r.u);
    s.source = r.source;
    out.solutions.push_back(std::move(s));
  }
  out.validated_count =
      static_cast<int>(std::count_if(out.solutions.begin(), out.solutions.end(), [](const auto& s) { return s.valid; }));
  return out;
}

// -------------------------------------------------------------- thresholds --

std::vector<Threshold> find_thresholds(const std::function<int(double)>& classifier, double lo, double hi, double tol,
                                       int steps) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("threshold search needs a finite range lo < hi");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("threshold tolerance must be positive");
  }
  if (steps < 1) {
    throw std::invalid_argument("threshold scan needs at least one cell");
  }
  std::vector<double> grid;
  std::vector<int> counts;
  for (int i = 0; i <= steps; ++i) {
    grid.push_back(i == steps ? hi : lo + (hi - lo) * i / steps);
    counts.push_back(classifier(grid.back()));
  }
  std::vector<Threshold> out;
  for (int i = 0; i < steps; ++i) {
    if (counts[static_cast<std::size_t>(i)] == counts[static_cast<std::size_t>(i) + 1]) {
      continue;
    }
    double left = grid[static_cast<std::size_t>(i)];
    double right = grid[static_cast<std::size_t>(i) + 1];
    const int below = counts[static_cast<std::size_t>(i)];
    const int above = counts[static_cast<std::size_t>(i) + 1];
    while (right - left > tol) {
      const double mid = 0.5 * (left + right);
      if (mid <= left || mid >= right) {
        break;
      }
      if (classifier(mid) == below) {
        left = mid;
      } else {
        right = mid;
      }
    }
    out.push_back({0.5 * (left + right), below, std::nullopt, above});
  }
  return out;
}

namespace {

/// Newton interpolation through (x_i, y_i), expanded to monomial form.
Poly interpolate(const std::vector<Rational>& xs, std::vector<Rational> ys) {
  const std::size_t n = xs.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      ys[i] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - level]);
    }
  }
  Poly acc;
  for (std::size_t i = n; i-- > 0;) {
    acc = acc * Poly::linear_root(xs[i]) + Poly::constant(ys[i]);
  }
  return acc;
}

/// Exact polynomials in a whose roots are the only places the Case-2 root
/// set can change shape.
std::vector<Poly> case2_event_polynomials(QuarticForm form) {
  constexpr int kNodes = 72;
  constexpr int kChecks = 3;
  std::vector<Rational> xs;
  std::vector<std::vector<Rational>> values;
  for (int i = 0; i < kNodes + kChecks; ++i) {
    const Rational a(i + 2);
    const auto f = case2_factor_list(a, form);
    const Poly lin = square_free_part(f[1]);
    const Poly* g[] = {&f[0], &lin, &f[2], &f[3]};
    std::vector<Rational> row;
    for (int s = 2; s < 4; ++s) {
      row.push_back(resultant(*g[s], g[s]->derivative()));
    }
    for (int s = 0; s < 4; ++s) {
      for (int t = s + 1; t < 4; ++t) {
        row.push_back(resultant(*g[s], *g[t]));
      }
    }
    row.push_back(f[3].coefficient(0));
    xs.push_back(a);
    values.push_back(std::move(row));
  }
  std::vector<Poly> out;
  const std::size_t kinds = values.front().size();
  for (std::size_t e = 0; e < kinds; ++e) {
    std::vector<Rational> ys;
    for (int i = 0; i < kNodes; ++i) {
      ys.push_back(values[static_cast<std::size_t>(i)][e]);
    }
    const std::vector<Rational> nodes(xs.begin(), xs.begin() + kNodes);
    Poly p = interpolate(nodes, ys);
    for (int i = kNodes; i < kNodes + kChecks; ++i) {
      if (!(p(xs[static_cast<std::size_t>(i)]) == values[static_cast<std::size_t>(i)][e])) {
        throw std::logic_error("event polynomial exceeds the interpolation degree bound");
      }
    }
    if (p.degree() >= 1) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

std::vector<Threshold> find_case2_critical_points(double lo, double hi, double tol, QuarticForm form) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi) || !(lo > 0.0)) {
    throw std::invalid_argument("critical-point search needs a finite range 0 < lo < hi");
  }
  const Rational rtol = rational_tolerance(std::min(tol, 1e-10));
  std::vector<double> events;
  for (const auto& g : case2_event_polynomials(form)) {
    for (const auto& r : isolate_and_refine(square_free_part(g), ExtendedPoint<Rational>(rationalize(lo)),
                                            ExtendedPoint<Rational>(rationalize(hi)), rtol)) {
      events.push_back(r.midpoint());
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(), [](double x, double y) { return close_relative(x, y, 1e-9); }),
               events.end());

  std::vector<Threshold> out;
  for (double e : events) {
    if (e == 1.0 || !(e > lo && e < hi)) {
      continue;
    }
    const double delta = 1e-6 * std::max(1.0, e);
    Threshold t;
    t.at = e;
    t.below = case2_count(e - delta, form);
    t.above = case2_count(e + delta, form);
    // Roots that coincide at the event sit within ~sqrt(error) of each other.
    t.at_count = case2_count(e, form, 1e-5);
    if (t.below != t.above || *t.at_count != t.below || *t.at_count != t.above) {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace gibbstree
