#pragma once

/**
 * (2,q)-Ising-Potts model on finite Cayley-tree slices.
 *
 * Each site carries a pair (sigma, s) with sigma in {-1, +1} and s in {1..q}.
 * Throughout the library a site state is flattened to an index
 *
 *     t = (sigma == +1 ? 0 : q) + (s - 1),        t in [0, 2q),
 *
 * which is also the entry order of field vectors: (h_{1,1..q}, h_{-1,1..q}).
 */

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace gibbstree {

struct ModelParams {
  int q = 3;
  int k = 2;
  double alpha = 0.0;
  double beta = 1.0;
  double J_I = 0.0;
  double J_P = 0.0;

  double theta_I() const;
  double theta_P() const;
  /// theta_I^alpha
  double a() const;
  /// theta_P^(1 - alpha)
  double b() const;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// beta = 1 and J = log(theta).
  static ModelParams from_weights(int q, int k, double alpha, double theta_I, double theta_P);
  /// Parameters whose derived weights are the given (a, b); alpha must lie in
  /// (0, 1) unless the corresponding weight is 1.
  static ModelParams from_ab(int q, int k, double a, double b, double alpha = 0.5);
};

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

enum class SpecialCase { ising, potts };

/// ising: alpha = 1, J_P = 0. potts: alpha = 0, J_I = 0. Asking for one kind
/// on parameters that already are the other kind is rejected.
ModelParams special_case(SpecialCase kind, const ModelParams& params);

struct Site {
  int sigma = 1;  // -1 or +1
  int s = 1;      // 1..q

  friend bool operator==(const Site&, const Site&) = default;
};

inline int state_index(const Site& site, int q) { return (site.sigma == 1 ? 0 : q) + site.s - 1; }
inline Site site_of(int state, int q) { return state < q ? Site{1, state + 1} : Site{-1, state - q + 1}; }

using Configuration = std::vector<Site>;

/// Ball V_n of radius n around the root of a Cayley tree of order k, stored in
/// breadth-first order so that V_m is the vertex prefix [0, |V_m|).
class CayleyTreeSlice {
 public:
  enum class RootDegree { k_plus_one, k };

  CayleyTreeSlice(int k, int depth, RootDegree root = RootDegree::k_plus_one);

  int k() const { return k_; }
  int depth() const { return depth_; }
  int size() const { return static_cast<int>(parent_.size()); }
  RootDegree root_degree() const { return root_; }

  int parent(int v) const { return parent_.at(static_cast<std::size_t>(v)); }
  std::span<const int> children(int v) const { return children_.at(static_cast<std::size_t>(v)); }
  int generation(int v) const { return generation_.at(static_cast<std::size_t>(v)); }

  /// Vertices of W_m.
  std::span<const int> sphere(int m) const;
  /// |V_m|
  int ball_size(int m) const;

 private:
  int k_;
  int depth_;
  RootDegree root_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> generation_;
  std::vector<int> order_;
  std::vector<int> offsets_;  // W_m = order_[offsets_[m], offsets_[m+1])
};

CayleyTreeSlice build_slice(int k, int n, CayleyTreeSlice::RootDegree root = CayleyTreeSlice::RootDegree::k_plus_one);

/// Per-vertex log-scale boundary fields h_{i,j,x}; a vertex may have none.
class FieldAssignment {
 public:
  FieldAssignment(int q, int vertex_count);

  int q() const { return q_; }
  int vertex_count() const { return static_cast<int>(fields_.size()); }

  void set(int v, std::vector<double> h);
  bool has(int v) const { return !fields_.at(static_cast<std::size_t>(v)).empty(); }
  /// h at vertex v for flattened state t; throws when v carries no field.
  double at(int v, int state) const;
  const std::vector<double>& vector(int v) const;

 private:
  int q_;
  std::vector<std::vector<double>> fields_;
};

/// -alpha J_I sum sigma(x)sigma(y) - (1-alpha) J_P sum delta(s(x), s(y)) over
/// the slice edges.
double hamiltonian(const ModelParams& params, const CayleyTreeSlice& slice, const Configuration& config);

/// mu_n(config) with n = slice depth and fields on W_n, normalized over all of
/// Omega_{V_n} (partition function by per-subtree summation in log space).
double finite_volume_measure(const ModelParams& params, const CayleyTreeSlice& slice, const FieldAssignment& fields,
                             const Configuration& config);

/// log Z_m with fields on W_m, by leaf-to-root summation.
double log_partition(const ModelParams& params, const CayleyTreeSlice& slice, const FieldAssignment& fields, int m);

/// Marginal law of the root spin under mu_m, indexed by flattened state.
std::vector<double> root_marginal(const ModelParams& params, const CayleyTreeSlice& slice,
                                  const FieldAssignment& fields, int m);

class OracleSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OracleMode { automatic, naive, factorized };

/// Configurations the exhaustive path may enumerate: 6^8.
inline constexpr std::uint64_t kExhaustiveLimit = 1679616;

/// Number of configurations on V_m, saturating at UINT64_MAX.
std::uint64_t configuration_count(int q, int vertex_count);

/// Marginal of mu_n on V_{n-1}, one entry per configuration of V_{n-1}
/// (mixed radix 2q, vertex 0 least significant).
std::vector<double> marginal_on_previous_ball(const ModelParams& params, const CayleyTreeSlice& slice,
                                              const FieldAssignment& fields, int n, OracleMode mode);

/// mu_{n-1} on V_{n-1}, same indexing as marginal_on_previous_ball.
std::vector<double> measure_table(const ModelParams& params, const CayleyTreeSlice& slice,
                                  const FieldAssignment& fields, int m, OracleMode mode);

struct CompatibilityReport {
  double max_deviation = 0.0;
  std::optional<double> naive_deviation;
  std::optional<double> factorized_deviation;
  /// Largest entry-wise gap between the two paths when both ran.
  std::optional<double> path_disagreement;
};

/// max over configurations c of V_{n-1} of |sum_w mu_n(c v w) - mu_{n-1}(c)|.
/// `automatic` runs both paths when the exhaustive one fits and factorized
/// summation otherwise; `naive` throws OracleSizeError when it does not fit.
CompatibilityReport check_compatibility(const ModelParams& params, const CayleyTreeSlice& slice,
                                        const FieldAssignment& fields, int n,
                                        OracleMode mode = OracleMode::automatic);

}  // namespace gibbstree
