#include "gibbstree/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gibbstree/boundary_law.hpp"

namespace gibbstree::cli {

namespace {

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json load_params_document(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return nlohmann::json::parse(text);
  }
  std::ifstream in(text);
  if (!in) {
    throw std::invalid_argument("cannot open params file " + text);
  }
  return nlohmann::json::parse(in);
}

int thread_count(int requested) {
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("GIBBSTREE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results keep index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(int n, int threads, Fn fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

std::pair<double, double> range_of(const RunConfig& config, double lo, double hi) {
  const double l = config.lo.value_or(lo);
  const double h = config.hi.value_or(hi);
  if (!std::isfinite(l) || !std::isfinite(h) || !(l < h)) {
    throw std::invalid_argument("range needs finite lo < hi");
  }
  return {l, h};
}

bool equal_couplings(const ModelParams& p) { return std::abs(p.a() - p.b()) <= 1e-12 * std::max(p.a(), p.b()); }

std::string target_or(const RunConfig& config, const std::string& fallback) {
  const std::string t = config.target.empty() ? fallback : config.target;
  if (t != "case1" && t != "case2" && t != "quartic") {
    throw std::invalid_argument("target must be case1, case2 or quartic");
  }
  return t;
}

/// A sweep over `a` only makes sense for Case 2 when couplings stay equal.
ParamSource sweep_source(const RunConfig& config, const std::string& target) {
  ParamSource source = config.params;
  if (target == "case2") {
    source.equal_couplings = true;
    source.b.reset();
  }
  return source;
}

}  // namespace

ModelParams resolve(const ParamSource& source) {
  ModelParams p;
  bool alpha_known = false;
  if (source.params_json) {
    p = load_params_document(*source.params_json).get<ModelParams>();
    alpha_known = true;
  }
  if (source.q) {
    p.q = *source.q;
  }
  if (source.k) {
    p.k = *source.k;
  }
  if (source.beta) {
    p.beta = *source.beta;
  }
  if (source.alpha) {
    p.alpha = *source.alpha;
    alpha_known = true;
  } else if (!alpha_known && (source.a || source.b)) {
    // a and b alone do not fix alpha; any interior value gives the same weights.
    p.alpha = 0.5;
  }
  if (!(p.beta > 0.0)) {
    throw std::invalid_argument("beta must be positive");
  }
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }

  const int ising_flags = (source.J_I ? 1 : 0) + (source.theta_I ? 1 : 0) + (source.a ? 1 : 0);
  const int potts_flags = (source.J_P ? 1 : 0) + (source.theta_P ? 1 : 0) + (source.b ? 1 : 0);
  if (ising_flags > 1) {
    throw std::invalid_argument("give at most one of --JI, --thetaI, --a");
  }
  if (potts_flags > 1) {
    throw std::invalid_argument("give at most one of --JP, --thetaP, --b");
  }
  auto positive_log = [](double w, const char* name) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
    return std::log(w);
  };
  if (source.J_I) {
    p.J_I = *source.J_I;
  } else if (source.theta_I) {
    p.J_I = positive_log(*source.theta_I, "thetaI") / p.beta;
  } else if (source.a) {
    const double la = positive_log(*source.a, "a");
    if (la != 0.0 && p.alpha == 0.0) {
      throw std::invalid_argument("a != 1 needs alpha > 0");
    }
    p.J_I = la == 0.0 ? 0.0 : la / (p.beta * p.alpha);
  }
  if (source.equal_couplings) {
    if (potts_flags > 0) {
      throw std::invalid_argument("--equal-couplings derives the Potts coupling; drop --JP/--thetaP/--b");
    }
    if (p.alpha >= 1.0) {
      throw std::invalid_argument("--equal-couplings needs alpha < 1");
    }
    p.J_P = p.alpha / (1.0 - p.alpha) * p.J_I;
  } else if (source.J_P) {
    p.J_P = *source.J_P;
  } else if (source.theta_P) {
    p.J_P = positive_log(*source.theta_P, "thetaP") / p.beta;
  } else if (source.b) {
    const double lb = positive_log(*source.b, "b");
    if (lb != 0.0 && p.alpha == 1.0) {
      throw std::invalid_argument("b != 1 needs alpha < 1");
    }
    p.J_P = lb == 0.0 ? 0.0 : lb / (p.beta * (1.0 - p.alpha));
  }
  p.validate();
  return p;
}

ParamSource with_param(ParamSource source, const std::string& name, double value) {
  if (name == "a") {
    source.J_I.reset();
    source.theta_I.reset();
    source.a = value;
  } else if (name == "b") {
    source.J_P.reset();
    source.theta_P.reset();
    source.b = value;
  } else if (name == "thetaI") {
    source.J_I.reset();
    source.a.reset();
    source.theta_I = value;
  } else if (name == "thetaP") {
    source.J_P.reset();
    source.b.reset();
    source.theta_P = value;
  } else if (name == "JI") {
    source.theta_I.reset();
    source.a.reset();
    source.J_I = value;
  } else if (name == "JP") {
    source.theta_P.reset();
    source.b.reset();
    source.J_P = value;
  } else if (name == "alpha") {
    source.alpha = value;
  } else if (name == "beta") {
    source.beta = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
  }
  return source;
}

nlohmann::json cmd_classify(const RunConfig& config) {
  const ModelParams p = resolve(config.params);
  nlohmann::json doc;
  doc["params"] = p;
  doc["weights"] = {{"theta_I", p.theta_I()}, {"theta_P", p.theta_P()}, {"a", p.a()}, {"b", p.b()}};
  doc["case1"] = classify_case1(p);
  if (p.k == 2 && p.q == 3 && equal_couplings(p)) {
    doc["case2"] = classify_case2_k2_q3(p, config.dedup_tol, config.form);
  }
  return doc;
}

std::string cmd_sweep(const RunConfig& config) {
  const std::string param = config.sweep_param.empty() ? (config.target == "case2" ? "a" : "thetaP")
                                                       : config.sweep_param;
  const std::string target = target_or(config, param == "a" ? "case2" : "case1");
  if (target == "quartic") {
    throw std::invalid_argument("sweep targets are case1 and case2");
  }
  if (!config.lo || !config.hi) {
    throw std::invalid_argument("sweep needs --lo and --hi");
  }
  const auto [lo, hi] = range_of(config, 0.0, 0.0);
  const int steps = config.steps == 0 ? 100 : config.steps;
  if (steps < 2) {
    throw std::invalid_argument("sweep needs at least 2 steps");
  }
  const ParamSource base = sweep_source(config, target);
  // Fail on the first point before fanning out.
  (void)resolve(with_param(base, param, lo));

  auto row = [&](int i) {
    const double x = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
    const ModelParams p = resolve(with_param(base, param, x));
    const PhaseClassification c =
        target == "case2" ? classify_case2_k2_q3(p, config.dedup_tol, config.form) : classify_case1(p);
    return format_number(x) + "," + std::to_string(c.count) + "," + std::to_string(c.validated_count) + "\n";
  };
  std::string csv = "param,count,validated_count\n";
  for (const auto& line : parallel_map<std::string>(steps, thread_count(config.threads), row)) {
    csv += line;
  }
  return csv;
}

nlohmann::json cmd_thresholds(const RunConfig& config) {
  const std::string target = target_or(config, "quartic");
  const int steps = config.steps == 0 ? 1000 : config.steps;
  nlohmann::json doc;
  doc["target"] = target;
  doc["tol"] = config.tol;
  std::vector<Threshold> found;
  if (target == "quartic") {
    const auto [lo, hi] = range_of(config, 1.1, 10.0);
    doc["range"] = {lo, hi};
    doc["quartic_form"] = to_string(config.form);
    found = find_thresholds([&](double a) { return count_quartic_positive_roots(a, config.form); }, lo, hi,
                            config.tol, steps);
  } else if (target == "case2") {
    const auto [lo, hi] = range_of(config, 1.1, 10.0);
    doc["range"] = {lo, hi};
    doc["quartic_form"] = to_string(config.form);
    found = find_case2_critical_points(lo, hi, config.tol, config.form);
  } else {
    const auto [lo, hi] = range_of(config, 1.0, 100.0);
    doc["range"] = {lo, hi};
    doc["param"] = "thetaP";
    const ParamSource base = config.params;
    (void)resolve(with_param(base, "thetaP", lo));
    found = find_thresholds([&](double t) { return classify_case1(resolve(with_param(base, "thetaP", t))).count; },
                            lo, hi, config.tol, steps);
  }
  doc["thresholds"] = found;
  return doc;
}

VerifyOutcome cmd_verify(const RunConfig& config) {
  const ModelParams p = resolve(config.params);
  if (config.depth < 1) {
    throw std::invalid_argument("verify needs --depth >= 1");
  }
  if (!(config.perturb > 0.0) || !std::isfinite(config.perturb)) {
    throw std::invalid_argument("--perturb must be positive");
  }
  const CayleyTreeSlice slice(p.k, config.depth);
  if (config.mode == OracleMode::naive &&
      configuration_count(p.q, slice.ball_size(config.depth)) > kExhaustiveLimit) {
    throw OracleSizeError("naive enumeration over " + std::to_string(slice.ball_size(config.depth)) +
                          " vertices exceeds the limit");
  }

  struct Candidate {
    std::string model_case;
    std::string source;
    BoundaryField field;
    bool diagnostic;
  };
  std::vector<Candidate> candidates;
  for (const auto& s : classify_case1(p).solutions) {
    candidates.push_back({"case1", s.source, embed_I1(p.q, s.z.front()), false});
  }
  if (p.k == 2 && p.q == 3 && equal_couplings(p) && p.a() != 1.0) {
    for (const auto& s : classify_case2_k2_q3(p, config.dedup_tol, config.form).solutions) {
      if (s.z.size() == 2) {
        // Only certified roots count towards the verdict.
        candidates.push_back({"case2", s.source, embed_I2(p.q, s.z[0], s.z[1]), !s.valid});
      }
    }
  }

  nlohmann::json results = nlohmann::json::array();
  double worst = 0.0;
  bool passed = true;
  for (const auto& c : candidates) {
    std::vector<double> z(c.field.entries().begin(), c.field.entries().end());
    for (std::size_t t = 0; t + 1 < z.size(); ++t) {
      z[t] *= config.perturb;
    }
    const BoundaryField field = BoundaryField::from_entries(z);
    std::vector<BoundaryField> fields(static_cast<std::size_t>(slice.size()), field);
    const std::vector<BoundaryField> root_children(static_cast<std::size_t>(slice.children(0).size()), field);
    fields.front() = apply_W_multi(p, root_children);
    const CompatibilityReport report =
        check_compatibility(p, slice, to_field_assignment(fields), config.depth, config.mode);
    const bool ok = report.max_deviation <= 1e-9 &&
                    (!report.path_disagreement || *report.path_disagreement <= 1e-9);
    nlohmann::json entry{{"case", c.model_case},
                         {"source", c.source},
                         {"field", field},
                         {"max_deviation", report.max_deviation},
                         {"pass", ok}};
    if (report.naive_deviation) {
      entry["naive_deviation"] = *report.naive_deviation;
    }
    if (report.factorized_deviation) {
      entry["factorized_deviation"] = *report.factorized_deviation;
    }
    if (report.path_disagreement) {
      entry["path_disagreement"] = *report.path_disagreement;
    }
    if (c.diagnostic) {
      entry["diagnostic"] = true;
    } else {
      worst = std::max(worst, report.max_deviation);
      passed = passed && ok;
    }
    results.push_back(std::move(entry));
  }
  const char* mode = config.mode == OracleMode::naive ? "naive"
                     : config.mode == OracleMode::factorized ? "factorized"
                                                             : "auto";
  nlohmann::json doc{{"params", p},           {"depth", config.depth}, {"mode", mode},
                     {"perturb", config.perturb}, {"results", results}, {"max_deviation", worst},
                     {"pass", passed}};
  return {doc, passed};
}

std::string cmd_sample_poly(const RunConfig& config) {
  const double a = config.params.a ? *config.params.a : resolve(config.params).a();
  if (!(a > 0.0)) {
    throw std::invalid_argument("a must be positive");
  }
  const auto [lo, hi] = range_of(config, 0.0, 10.0);
  const int steps = config.steps == 0 ? 1001 : config.steps;
  if (steps < 2) {
    throw std::invalid_argument("sample-poly needs at least 2 steps");
  }
  const auto poly = quartic_q3_equal(rationalize_near(a), config.form);
  std::string csv = "x,P\n";
  for (int i = 0; i < steps; ++i) {
    const double x = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
    csv += format_number(x) + "," + format_number(poly.evaluate(x)) + "\n";
  }
  return csv;
}

namespace {

void add_model_options(CLI::App& app, RunConfig& config) {
  auto& s = config.params;
  app.add_option("--params", s.params_json, "ModelParams JSON document or file");
  app.add_option("--q", s.q, "Potts spin count (>= 3)");
  app.add_option("--k", s.k, "Tree order");
  app.add_option("--alpha", s.alpha, "Ising/Potts mixing weight in [0, 1]");
  app.add_option("--beta", s.beta, "Inverse temperature");
  app.add_option("--JI", s.J_I, "Ising coupling");
  app.add_option("--JP", s.J_P, "Potts coupling");
  app.add_option("--thetaI", s.theta_I, "exp(beta J_I)");
  app.add_option("--thetaP", s.theta_P, "exp(beta J_P)");
  app.add_option("--a", s.a, "theta_I^alpha");
  app.add_option("--b", s.b, "theta_P^(1-alpha)");
  app.add_flag("--equal-couplings", s.equal_couplings, "Force b = a (J_P = alpha/(1-alpha) J_I)");
  app.add_option("--out", config.out_path, "Write output here instead of stdout");
  app.add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", config.tol, "Threshold tolerance");
  app.add_option("--dedup-tol", config.dedup_tol, "Relative root de-duplication tolerance");
  app.add_option_function<std::string>(
      "--form", [&config](const std::string& v) { config.form = parse_quartic_form(v); },
      "Quartic form: derived or as_printed");
}

void add_range_options(CLI::App& app, RunConfig& config) {
  app.add_option("--lo", config.lo, "Range start");
  app.add_option("--hi", config.hi, "Range end");
  app.add_option("--steps", config.steps, "Grid points");
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.out_path);
  if (!file) {
    throw std::invalid_argument("cannot write " + config.out_path);
  }
  file << text;
}

std::string json_text(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::string classify_csv(const nlohmann::json& doc) {
  std::string csv = "case,count,exact_count,validated_count,regime,boundary_uncertain\n";
  for (const char* key : {"case1", "case2"}) {
    if (!doc.contains(key)) {
      continue;
    }
    const auto& c = doc[key];
    const int validated = c.contains("validated_count") ? c["validated_count"].get<int>() : c["count"].get<int>();
    csv += std::string(key) + "," + std::to_string(c["count"].get<int>()) + "," +
           std::to_string(c["exact_count"].get<int>()) + "," + std::to_string(validated) + "," +
           c["regime"].get<std::string>() + "," + (c["boundary_uncertain"].get<bool>() ? "true" : "false") + "\n";
  }
  return csv;
}

std::string thresholds_csv(const nlohmann::json& doc) {
  std::string csv = "at,below,at_count,above\n";
  for (const auto& t : doc["thresholds"]) {
    // Bisection on a count has no count at the located point; leave it blank.
    const std::string at_count = t.contains("at_count") ? std::to_string(t["at_count"].get<int>()) : "";
    csv += format_number(t["at"].get<double>()) + "," + std::to_string(t["below"].get<int>()) + "," + at_count + "," +
           std::to_string(t["above"].get<int>()) + "\n";
  }
  return csv;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Splitting Gibbs measures of the (2,q)-Ising-Potts model on Cayley trees"};
  app.require_subcommand(1);
  RunConfig config;

  auto* classify = app.add_subcommand("classify", "Count translation-invariant measures at one point");
  add_model_options(*classify, config);

  auto* sweep = app.add_subcommand("sweep", "Counts over a parameter grid (CSV)");
  add_model_options(*sweep, config);
  add_range_options(*sweep, config);
  sweep->add_option("--param", config.sweep_param, "Swept parameter: a, b, thetaI, thetaP, JI, JP, alpha, beta");
  sweep->add_option("--target", config.target, "case1 or case2");

  auto* thresholds = app.add_subcommand("thresholds", "Locate critical points");
  add_model_options(*thresholds, config);
  add_range_options(*thresholds, config);
  thresholds->add_option("--target", config.target, "quartic, case2 or case1");

  auto* verify = app.add_subcommand("verify", "Check every solution against the finite-volume oracle");
  add_model_options(*verify, config);
  verify->add_option("--depth", config.depth, "Slice depth n");
  verify->add_option_function<std::string>(
      "--mode",
      [&config](const std::string& v) {
        if (v == "auto") {
          config.mode = OracleMode::automatic;
        } else if (v == "naive") {
          config.mode = OracleMode::naive;
        } else if (v == "factorized") {
          config.mode = OracleMode::factorized;
        } else {
          throw CLI::ValidationError("--mode", "must be auto, naive or factorized");
        }
      },
      "auto, naive or factorized");
  verify->add_option("--perturb", config.perturb, "Multiply every free entry of each solution by this factor");

  auto* sample = app.add_subcommand("sample-poly", "Sample the a = b, q = 3 quartic (CSV)");
  add_model_options(*sample, config);
  add_range_options(*sample, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  try {
    if (classify->parsed()) {
      const auto doc = cmd_classify(config);
      emit(config, config.format == "csv" ? classify_csv(doc) : json_text(doc), out);
    } else if (sweep->parsed()) {
      if (config.format == "json") {
        throw std::invalid_argument("sweep emits CSV only");
      }
      emit(config, cmd_sweep(config), out);
    } else if (thresholds->parsed()) {
      const auto doc = cmd_thresholds(config);
      emit(config, config.format == "csv" ? thresholds_csv(doc) : json_text(doc), out);
    } else if (verify->parsed()) {
      if (config.format == "csv") {
        throw std::invalid_argument("verify emits JSON only");
      }
      const auto outcome = cmd_verify(config);
      emit(config, json_text(outcome.report), out);
      return outcome.passed ? kOk : kVerifyFailed;
    } else if (sample->parsed()) {
      if (config.format == "json") {
        throw std::invalid_argument("sample-poly emits CSV only");
      }
      emit(config, cmd_sample_poly(config), out);
    }
  } catch (const OracleSizeError& e) {
    err << "error: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}

}  // namespace gibbstree::cli
