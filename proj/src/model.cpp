#include "gibbstree/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gibbstree {

namespace {

double log_sum_exp(std::span<const double> xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    top = std::max(top, x);
  }
  if (!std::isfinite(top)) {
    return top;
  }
  // Long sums over every configuration, so accumulate in extended precision.
  long double acc = 0.0L;
  for (double x : xs) {
    acc += std::exp(x - top);
  }
  return top + static_cast<double>(std::log(acc));
}

/// -beta times the energy of one edge, in flattened states.
class EdgeWeights {
 public:
  explicit EdgeWeights(const ModelParams& p) : states_(2 * p.q), table_(static_cast<std::size_t>(states_ * states_)) {
    const double ising = p.beta * p.alpha * p.J_I;
    const double potts = p.beta * (1.0 - p.alpha) * p.J_P;
    for (int t = 0; t < states_; ++t) {
      const Site x = site_of(t, p.q);
      for (int u = 0; u < states_; ++u) {
        const Site y = site_of(u, p.q);
        table_[static_cast<std::size_t>(t * states_ + u)] =
            ising * x.sigma * y.sigma + (x.s == y.s ? potts : 0.0);
      }
    }
  }

  double operator()(int t, int u) const { return table_[static_cast<std::size_t>(t * states_ + u)]; }
  int states() const { return states_; }

 private:
  int states_;
  std::vector<double> table_;
};

void require_fields_on_sphere(const CayleyTreeSlice& slice, const FieldAssignment& fields, int m) {
  for (int v : slice.sphere(m)) {
    if (!fields.has(v)) {
      throw std::invalid_argument("missing boundary field on generation " + std::to_string(m) + " (vertex " +
                                  std::to_string(v) + ")");
    }
  }
}

void require_level(const CayleyTreeSlice& slice, int m) {
  if (m < 0 || m > slice.depth()) {
    throw std::invalid_argument("level " + std::to_string(m) + " outside slice of depth " +
                                std::to_string(slice.depth()));
  }
}

/// Per-vertex log messages L_x(t) for the ball V_m with fields on W_m.
std::vector<std::vector<double>> upward_messages(const ModelParams& params, const CayleyTreeSlice& slice,
                                                 const FieldAssignment& fields, int m) {
  require_level(slice, m);
  require_fields_on_sphere(slice, fields, m);
  const EdgeWeights eps(params);
  const int states = eps.states();
  std::vector<std::vector<double>> msg(static_cast<std::size_t>(slice.ball_size(m)));
  std::vector<double> scratch(static_cast<std::size_t>(states));
  for (int g = m; g >= 0; --g) {
    for (int x : slice.sphere(g)) {
      auto& out = msg[static_cast<std::size_t>(x)];
      if (g == m) {
        out = fields.vector(x);
        continue;
      }
      out.assign(static_cast<std::size_t>(states), 0.0);
      for (int y : slice.children(x)) {
        const auto& child = msg[static_cast<std::size_t>(y)];
        for (int t = 0; t < states; ++t) {
          for (int u = 0; u < states; ++u) {
            scratch[static_cast<std::size_t>(u)] = eps(t, u) + child[static_cast<std::size_t>(u)];
          }
          out[static_cast<std::size_t>(t)] += log_sum_exp(scratch);
        }
      }
    }
  }
  return msg;
}

/// Odometer over all configurations of the vertex prefix [0, count).
class ConfigurationCounter {
 public:
  ConfigurationCounter(int states, int count) : states_(states), digits_(static_cast<std::size_t>(count), 0) {}

  const std::vector<int>& digits() const { return digits_; }

  bool next() {
    for (auto& d : digits_) {
      if (++d < states_) {
        return true;
      }
      d = 0;
    }
    return false;
  }

 private:
  int states_;
  std::vector<int> digits_;
};

/// Unnormalized log weight of a configuration of V_m with fields on W_m.
double log_weight(const EdgeWeights& eps, const CayleyTreeSlice& slice, const FieldAssignment& fields, int m,
                  const std::vector<int>& states) {
  double w = 0.0;
  const int n = slice.ball_size(m);
  for (int v = 1; v < n; ++v) {
    w += eps(states[static_cast<std::size_t>(slice.parent(v))], states[static_cast<std::size_t>(v)]);
  }
  for (int x : slice.sphere(m)) {
    w += fields.at(x, states[static_cast<std::size_t>(x)]);
  }
  return w;
}

void require_enumerable(int q, int vertices, const char* what) {
  if (configuration_count(q, vertices) > kExhaustiveLimit) {
    throw OracleSizeError(std::string(what) + ": " + std::to_string(vertices) +
                          " vertices exceed the enumeration limit of " + std::to_string(kExhaustiveLimit) +
                          " configurations");
  }
}

std::vector<double> naive_marginal(const ModelParams& params, const CayleyTreeSlice& slice,
                                   const FieldAssignment& fields, int n) {
  const int big = slice.ball_size(n);
  require_enumerable(params.q, big, "exhaustive enumeration");
  require_fields_on_sphere(slice, fields, n);
  const EdgeWeights eps(params);
  const auto small_count = configuration_count(params.q, slice.ball_size(n - 1));

  std::vector<double> weights;
  weights.reserve(configuration_count(params.q, big));
  ConfigurationCounter counter(eps.states(), big);
  do {
    weights.push_back(log_weight(eps, slice, fields, n, counter.digits()));
  } while (counter.next());
  const double log_z = log_sum_exp(weights);

  std::vector<long double> acc(small_count, 0.0L);
  for (std::size_t idx = 0; idx < weights.size(); ++idx) {
    acc[idx % small_count] += std::exp(weights[idx] - log_z);
  }
  return {acc.begin(), acc.end()};
}

std::vector<double> factorized_marginal(const ModelParams& params, const CayleyTreeSlice& slice,
                                        const FieldAssignment& fields, int n) {
  const int small = slice.ball_size(n - 1);
  require_enumerable(params.q, small, "factorized summation");
  const double log_z = log_partition(params, slice, fields, n);
  const EdgeWeights eps(params);
  const int states = eps.states();

  // phi[x][t]: log of the summed weight of the children of x in W_n given x in state t.
  std::vector<std::vector<double>> phi(static_cast<std::size_t>(small));
  std::vector<double> scratch(static_cast<std::size_t>(states));
  for (int x : slice.sphere(n - 1)) {
    auto& row = phi[static_cast<std::size_t>(x)];
    row.assign(static_cast<std::size_t>(states), 0.0);
    for (int y : slice.children(x)) {
      for (int t = 0; t < states; ++t) {
        for (int u = 0; u < states; ++u) {
          scratch[static_cast<std::size_t>(u)] = eps(t, u) + fields.at(y, u);
        }
        row[static_cast<std::size_t>(t)] += log_sum_exp(scratch);
      }
    }
  }

  std::vector<double> table;
  table.reserve(configuration_count(params.q, small));
  ConfigurationCounter counter(states, small);
  do {
    const auto& digits = counter.digits();
    double w = 0.0;
    for (int v = 1; v < small; ++v) {
      w += eps(digits[static_cast<std::size_t>(slice.parent(v))], digits[static_cast<std::size_t>(v)]);
    }
    for (int x : slice.sphere(n - 1)) {
      w += phi[static_cast<std::size_t>(x)][static_cast<std::size_t>(digits[static_cast<std::size_t>(x)])];
    }
    table.push_back(std::exp(w - log_z));
  } while (counter.next());
  return table;
}

double max_abs_gap(const std::vector<double>& x, const std::vector<double>& y) {
  double gap = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    gap = std::max(gap, std::abs(x[i] - y[i]));
  }
  return gap;
}

}  // namespace

double ModelParams::theta_I() const { return std::exp(beta * J_I); }
double ModelParams::theta_P() const { return std::exp(beta * J_P); }
double ModelParams::a() const { return std::exp(beta * alpha * J_I); }
double ModelParams::b() const { return std::exp(beta * (1.0 - alpha) * J_P); }

void ModelParams::validate() const {
  if (q < 3) {
    throw std::invalid_argument("q must be at least 3 (got " + std::to_string(q) + ")");
  }
  if (k < 1) {
    throw std::invalid_argument("k must be at least 1 (got " + std::to_string(k) + ")");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be positive and finite");
  }
  if (!std::isfinite(J_I) || !std::isfinite(J_P)) {
    throw std::invalid_argument("couplings must be finite");
  }
  for (double w : {theta_I(), theta_P(), a(), b()}) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("derived weights must be positive and finite");
    }
  }
}

ModelParams ModelParams::from_weights(int q, int k, double alpha, double theta_I, double theta_P) {
  if (!(theta_I > 0.0) || !(theta_P > 0.0)) {
    throw std::invalid_argument("theta_I and theta_P must be positive");
  }
  ModelParams p{q, k, alpha, 1.0, std::log(theta_I), std::log(theta_P)};
  p.validate();
  return p;
}

ModelParams ModelParams::from_ab(int q, int k, double a, double b, double alpha) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("a and b must be positive");
  }
  ModelParams p{q, k, alpha, 1.0, 0.0, 0.0};
  if (a != 1.0) {
    if (!(alpha > 0.0)) {
      throw std::invalid_argument("a != 1 requires alpha > 0");
    }
    p.J_I = std::log(a) / alpha;
  }
  if (b != 1.0) {
    if (!(alpha < 1.0)) {
      throw std::invalid_argument("b != 1 requires alpha < 1");
    }
    p.J_P = std::log(b) / (1.0 - alpha);
  }
  p.validate();
  return p;
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"q", p.q}, {"k", p.k}, {"alpha", p.alpha}, {"beta", p.beta}, {"J_I", p.J_I}, {"J_P", p.J_P}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  ModelParams out;
  out.q = j.at("q").get<int>();
  out.k = j.at("k").get<int>();
  out.alpha = j.at("alpha").get<double>();
  out.beta = j.at("beta").get<double>();
  out.J_I = j.at("J_I").get<double>();
  out.J_P = j.at("J_P").get<double>();
  out.validate();
  p = out;
}

ModelParams special_case(SpecialCase kind, const ModelParams& params) {
  ModelParams out = params;
  switch (kind) {
    case SpecialCase::ising:
      if (params.alpha == 0.0 && params.J_I == 0.0) {
        throw std::invalid_argument("parameters are already a pure Potts model");
      }
      out.alpha = 1.0;
      out.J_P = 0.0;
      break;
    case SpecialCase::potts:
      if (params.alpha == 1.0 && params.J_P == 0.0) {
        throw std::invalid_argument("parameters are already a pure Ising model");
      }
      out.alpha = 0.0;
      out.J_I = 0.0;
      break;
  }
  return out;
}

CayleyTreeSlice::CayleyTreeSlice(int k, int depth, RootDegree root) : k_(k), depth_(depth), root_(root) {
  if (k < 1) {
    throw std::invalid_argument("tree order k must be positive");
  }
  if (depth < 0) {
    throw std::invalid_argument("slice depth must be non-negative");
  }
  parent_.push_back(-1);
  children_.emplace_back();
  generation_.push_back(0);
  order_.push_back(0);
  offsets_ = {0, 1};
  for (int g = 0; g < depth; ++g) {
    const int begin = offsets_[static_cast<std::size_t>(g)];
    const int end = offsets_[static_cast<std::size_t>(g) + 1];
    for (int i = begin; i < end; ++i) {
      const int x = order_[static_cast<std::size_t>(i)];
      const int fanout = (x == 0 && root == RootDegree::k_plus_one) ? k + 1 : k;
      for (int c = 0; c < fanout; ++c) {
        const int y = static_cast<int>(parent_.size());
        parent_.push_back(x);
        children_.emplace_back();
        generation_.push_back(g + 1);
        children_[static_cast<std::size_t>(x)].push_back(y);
        order_.push_back(y);
      }
    }
    offsets_.push_back(static_cast<int>(order_.size()));
  }
}

std::span<const int> CayleyTreeSlice::sphere(int m) const {
  if (m < 0 || m > depth_) {
    throw std::out_of_range("sphere index outside slice");
  }
  const auto begin = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(m)]);
  const auto end = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(m) + 1]);
  return std::span<const int>(order_).subspan(begin, end - begin);
}

int CayleyTreeSlice::ball_size(int m) const {
  if (m < 0 || m > depth_) {
    throw std::out_of_range("ball index outside slice");
  }
  return offsets_[static_cast<std::size_t>(m) + 1];
}

CayleyTreeSlice build_slice(int k, int n, CayleyTreeSlice::RootDegree root) { return CayleyTreeSlice(k, n, root); }

FieldAssignment::FieldAssignment(int q, int vertex_count) : q_(q), fields_(static_cast<std::size_t>(vertex_count)) {}

void FieldAssignment::set(int v, std::vector<double> h) {
  if (static_cast<int>(h.size()) != 2 * q_) {
    throw std::invalid_argument("field vector must have 2q entries");
  }
  for (double x : h) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("field entries must be finite");
    }
  }
  fields_.at(static_cast<std::size_t>(v)) = std::move(h);
}

double FieldAssignment::at(int v, int state) const { return vector(v).at(static_cast<std::size_t>(state)); }

const std::vector<double>& FieldAssignment::vector(int v) const {
  const auto& h = fields_.at(static_cast<std::size_t>(v));
  if (h.empty()) {
    throw std::invalid_argument("no field at vertex " + std::to_string(v));
  }
  return h;
}

double hamiltonian(const ModelParams& params, const CayleyTreeSlice& slice, const Configuration& config) {
  if (static_cast<int>(config.size()) != slice.size()) {
    throw std::invalid_argument("configuration does not match slice size");
  }
  double ising = 0.0;
  double potts = 0.0;
  for (int v = 1; v < slice.size(); ++v) {
    const Site& x = config[static_cast<std::size_t>(slice.parent(v))];
    const Site& y = config[static_cast<std::size_t>(v)];
    ising += x.sigma * y.sigma;
    potts += x.s == y.s ? 1.0 : 0.0;
  }
  return -params.alpha * params.J_I * ising - (1.0 - params.alpha) * params.J_P * potts;
}

double log_partition(const ModelParams& params, const CayleyTreeSlice& slice, const FieldAssignment& fields, int m) {
  const auto msg = upward_messages(params, slice, fields, m);
  return log_sum_exp(msg.front());
}

std::vector<double> root_marginal(const ModelParams& params, const CayleyTreeSlice& slice,
                                  const FieldAssignment& fields, int m) {
  const auto msg = upward_messages(params, slice, fields, m);
  const auto& root = msg.front();
  const double log_z = log_sum_exp(root);
  std::vector<double> out;
  out.reserve(root.size());
  for (double x : root) {
    out.push_back(std::exp(x - log_z));
  }
  return out;
}

double finite_volume_measure(const ModelParams& params, const CayleyTreeSlice& slice, const FieldAssignment& fields,
                             const Configuration& config) {
  if (static_cast<int>(config.size()) != slice.size()) {
    throw std::invalid_argument("configuration does not match slice size");
  }
  const int n = slice.depth();
  require_fields_on_sphere(slice, fields, n);
  std::vector<int> states;
  states.reserve(config.size());
  for (const Site& site : config) {
    if ((site.sigma != 1 && site.sigma != -1) || site.s < 1 || site.s > params.q) {
      throw std::invalid_argument("site state outside {-1,1} x {1..q}");
    }
    states.push_back(state_index(site, params.q));
  }
  const EdgeWeights eps(params);
  return std::exp(log_weight(eps, slice, fields, n, states) - log_partition(params, slice, fields, n));
}

std::uint64_t configuration_count(int q, int vertex_count) {
  std::uint64_t count = 1;
  const auto states = static_cast<std::uint64_t>(2 * q);
  for (int i = 0; i < vertex_count; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / states) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= states;
  }
  return count;
}

std::vector<double> marginal_on_previous_ball(const ModelParams& params, const CayleyTreeSlice& slice,
                                              const FieldAssignment& fields, int n, OracleMode mode) {
  if (n < 1) {
    throw std::invalid_argument("marginalization needs n >= 1");
  }
  require_level(slice, n);
  if (mode == OracleMode::naive) {
    return naive_marginal(params, slice, fields, n);
  }
  return factorized_marginal(params, slice, fields, n);
}

std::vector<double> measure_table(const ModelParams& params, const CayleyTreeSlice& slice,
                                  const FieldAssignment& fields, int m, OracleMode mode) {
  require_level(slice, m);
  require_fields_on_sphere(slice, fields, m);
  const int size = slice.ball_size(m);
  require_enumerable(params.q, size, "measure table");
  const EdgeWeights eps(params);
  std::vector<double> weights;
  weights.reserve(configuration_count(params.q, size));
  ConfigurationCounter counter(eps.states(), size);
  do {
    weights.push_back(log_weight(eps, slice, fields, m, counter.digits()));
  } while (counter.next());
  const double log_z = mode == OracleMode::naive ? log_sum_exp(weights) : log_partition(params, slice, fields, m);
  for (double& w : weights) {
    w = std::exp(w - log_z);
  }
  return weights;
}

CompatibilityReport check_compatibility(const ModelParams& params, const CayleyTreeSlice& slice,
                                        const FieldAssignment& fields, int n, OracleMode mode) {
  if (n < 1) {
    throw std::invalid_argument("compatibility needs n >= 1");
  }
  require_level(slice, n);
  require_fields_on_sphere(slice, fields, n - 1);
  require_fields_on_sphere(slice, fields, n);

  const bool naive_fits = configuration_count(params.q, slice.ball_size(n)) <= kExhaustiveLimit;
  const bool run_naive = mode == OracleMode::naive || (mode == OracleMode::automatic && naive_fits);
  const bool run_factorized = mode != OracleMode::naive;

  CompatibilityReport report;
  std::vector<double> naive_marg, naive_prev, fact_marg, fact_prev;
  if (run_naive) {
    naive_marg = naive_marginal(params, slice, fields, n);
    naive_prev = measure_table(params, slice, fields, n - 1, OracleMode::naive);
    report.naive_deviation = max_abs_gap(naive_marg, naive_prev);
  }
  if (run_factorized) {
    fact_marg = factorized_marginal(params, slice, fields, n);
    fact_prev = measure_table(params, slice, fields, n - 1, OracleMode::factorized);
    report.factorized_deviation = max_abs_gap(fact_marg, fact_prev);
  }
  if (run_naive && run_factorized) {
    report.path_disagreement = std::max(max_abs_gap(naive_marg, fact_marg), max_abs_gap(naive_prev, fact_prev));
  }
  report.max_deviation = std::max(report.naive_deviation.value_or(0.0), report.factorized_deviation.value_or(0.0));
  return report;
}

}  // namespace gibbstree
