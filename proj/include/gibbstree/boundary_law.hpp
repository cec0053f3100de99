#pragma once

/**
 * Boundary laws and the translation-invariant operator W.
 *
 * A BoundaryField holds z_{i,j} = exp(h_{i,j} - h_{-1,q}) in flattened state
 * order (see model.hpp), so the last entry is the pinned z_{-1,q} = 1.
 */

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbstree/model.hpp"
#include "json.hpp"

namespace gibbstree {

class BoundaryField {
 public:
  /// All-ones field.
  explicit BoundaryField(int q);
  /// Entries in flattened order; the last one must be exactly 1.
  static BoundaryField from_entries(std::vector<double> entries);
  /// Positive entries in flattened order, rescaled so that the last is 1.
  static BoundaryField normalized(std::span<const double> entries);

  int q() const { return static_cast<int>(z_.size()) / 2; }
  std::span<const double> entries() const { return z_; }

  /// z_{i,j}, i in {-1, 1}, j in 1..q.
  double operator()(int i, int j) const;
  double at(int state) const { return z_.at(static_cast<std::size_t>(state)); }
  /// Any entry but the pinned one.
  void set(int i, int j, double value);

  /// log z, the boundary field h up to an additive constant.
  std::vector<double> log_entries() const;

  friend bool operator==(const BoundaryField&, const BoundaryField&) = default;

 private:
  explicit BoundaryField(std::vector<double> z) : z_(std::move(z)) {}
  std::vector<double> z_;
};

void to_json(nlohmann::json& j, const BoundaryField& z);
void from_json(const nlohmann::json& j, BoundaryField& z);

enum class InvariantSet { I1, I2, general };

std::string to_string(InvariantSet set);

/// z_{+-1,j} = z for j < q, z_{1,q} = z_{-1,q} = 1.
BoundaryField embed_I1(int q, double z);
/// z_{1,j} = z1 and z_{-1,j} = z2 for j < q, z_{1,q} = z_{-1,q} = 1.
BoundaryField embed_I2(int q, double z1, double z2);

/// Largest relative spread inside the groups {z_{1,j}}_{j<q} and {z_{-1,j}}_{j<q}.
double tied_group_spread(const BoundaryField& z);
/// Relative distance to I2: tied-group spread combined with |z_{1,q} - 1|.
double distance_to_I2(const BoundaryField& z);
/// Relative distance to I1: distance to I2 plus the gap between the two groups.
double distance_to_I1(const BoundaryField& z);
/// Smallest invariant set containing z within tol (I1 before I2).
InvariantSet invariant_set_of(const BoundaryField& z, double tol);

/// W(z) from the ratio form: N_{i,j} = sum_{u,v} exp(beta alpha J_I i u +
/// beta (1-alpha) J_P delta_{jv}) z_{u,v}, entry (N_{i,j} / N_{-1,q})^k.
/// Sums run in log space.
BoundaryField apply_W(const ModelParams& params, const BoundaryField& z);

/// The same map from the compact display in terms of a and b.
BoundaryField apply_W_compact(const ModelParams& params, const BoundaryField& z);

/// Product over children of the per-child ratios N_{i,j}(y) / N_{-1,q}(y).
BoundaryField apply_W_multi(const ModelParams& params, std::span<const BoundaryField> children);

/// Fields on every vertex of the slice, computed leaf-to-root from the
/// fields on the deepest generation. `boundary` is indexed by vertex id and
/// only its entries on W_depth are read.
std::vector<BoundaryField> propagate_fields(const ModelParams& params, const CayleyTreeSlice& slice,
                                            const std::vector<std::optional<BoundaryField>>& boundary);

/// log z per vertex, ready for the finite-volume oracle.
FieldAssignment to_field_assignment(std::span<const BoundaryField> fields);

enum class IterationStatus { converged, max_iter, diverged };

std::string to_string(IterationStatus status);

struct IterationResult {
  IterationStatus status = IterationStatus::max_iter;
  BoundaryField field{3};
  /// W applications accepted before the stopping test fired.
  long iterations = 0;
  /// Sup-norm of the last step, equal to the fixed-point residual there.
  double last_step = 0.0;
  InvariantSet invariant_set = InvariantSet::general;
};

/// Plain iteration z <- W(z), stopping once sup |W(z) - z| < tol.
IterationResult iterate_W(const ModelParams& params, const BoundaryField& z0, long max_iter = 100000,
                          double tol = 1e-12);

struct FixedPointCheck {
  bool fixed = false;
  double residual = 0.0;
};

/// residual = sup |W(z) - z|.
FixedPointCheck is_fixed_point(const ModelParams& params, const BoundaryField& z, double tol);

}  // namespace gibbstree
