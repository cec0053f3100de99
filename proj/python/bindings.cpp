#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "gibbstree/boundary_law.hpp"
#include "gibbstree/cli.hpp"
#include "gibbstree/sturm.hpp"
#include "gibbstree/tigm.hpp"

namespace py = pybind11;
using namespace gibbstree;

namespace {

// Documents cross the boundary as JSON text; the python side parses them.
ModelParams params_from(const std::string& doc) { return nlohmann::json::parse(doc).get<ModelParams>(); }

std::vector<double> entries(const BoundaryField& z) { return {z.entries().begin(), z.entries().end()}; }

}  // namespace

PYBIND11_MODULE(_gibbstree, m) {
  m.doc() = "Splitting Gibbs measures of the (2,q)-Ising-Potts model on Cayley trees";

  py::register_exception<OracleSizeError>(m, "OracleSizeError");

  m.def(
      "classify",
      [](const std::string& params, double dedup_tol, const std::string& form) {
        const ModelParams p = params_from(params);
        nlohmann::json doc{{"params", p}, {"case1", classify_case1(p)}};
        if (p.k == 2 && p.q == 3 && std::abs(p.a() - p.b()) <= 1e-12 * p.a()) {
          doc["case2"] = classify_case2_k2_q3(p, dedup_tol, parse_quartic_form(form));
        }
        return doc.dump();
      },
      py::arg("params"), py::arg("dedup_tol") = 1e-9, py::arg("form") = "derived");

  m.def(
      "classify_case2",
      [](double a, double dedup_tol, const std::string& form) {
        return nlohmann::json(classify_case2_k2_q3(a, dedup_tol, parse_quartic_form(form))).dump();
      },
      py::arg("a"), py::arg("dedup_tol") = 1e-9, py::arg("form") = "derived");

  m.def(
      "solve_case1", [](const std::string& params) { return solve_case1(params_from(params)); }, py::arg("params"));

  m.def(
      "count_quartic_positive_roots",
      [](double a, const std::string& form) { return count_quartic_positive_roots(a, parse_quartic_form(form)); },
      py::arg("a"), py::arg("form") = "derived");

  m.def(
      "quartic_coefficients",
      [](const std::string& a, const std::string& form) {
        std::vector<std::string> out;
        const auto quartic = quartic_q3_equal(parse_rational(a), parse_quartic_form(form));
        for (const auto& c : quartic.coeffs()) {
          out.push_back(format_rational(c));
        }
        return out;
      },
      py::arg("a"), py::arg("form") = "derived", "Exact coefficients as \"num/den\" strings, constant term first.");

  m.def(
      "quartic_thresholds",
      [](double lo, double hi, double tol, const std::string& form) {
        const QuarticForm f = parse_quartic_form(form);
        std::vector<double> at;
        for (const auto& t : find_thresholds([f](double a) { return count_quartic_positive_roots(a, f); }, lo, hi, tol)) {
          at.push_back(t.at);
        }
        return at;
      },
      py::arg("lo") = 1.1, py::arg("hi") = 10.0, py::arg("tol") = 1e-4, py::arg("form") = "derived");

  m.def(
      "case2_critical_points",
      [](double lo, double hi, double tol, const std::string& form) {
        return nlohmann::json(find_case2_critical_points(lo, hi, tol, parse_quartic_form(form))).dump();
      },
      py::arg("lo") = 1.1, py::arg("hi") = 10.0, py::arg("tol") = 1e-4, py::arg("form") = "derived");

  m.def(
      "apply_W",
      [](const std::string& params, const std::vector<double>& z) {
        return entries(apply_W(params_from(params), BoundaryField::from_entries(z)));
      },
      py::arg("params"), py::arg("z"));

  m.def(
      "is_fixed_point",
      [](const std::string& params, const std::vector<double>& z, double tol) {
        const auto check = is_fixed_point(params_from(params), BoundaryField::from_entries(z), tol);
        return py::make_tuple(check.fixed, check.residual);
      },
      py::arg("params"), py::arg("z"), py::arg("tol") = 1e-9);

  m.def(
      "verify",
      [](const std::string& params, int depth, double perturb) {
        cli::RunConfig config;
        config.params.params_json = params;
        config.depth = depth;
        config.perturb = perturb;
        return cli::cmd_verify(config).report.dump();
      },
      py::arg("params"), py::arg("depth") = 2, py::arg("perturb") = 1.0);

  m.def(
      "count_roots",
      [](const std::vector<std::string>& coeffs) {
        std::vector<Rational> c;
        for (const auto& s : coeffs) {
          c.push_back(parse_rational(s));
        }
        return count_positive_roots(Polynomial<Rational>(std::move(c)));
      },
      py::arg("coeffs"), "Distinct positive real roots of an exact polynomial given constant term first.");
}
