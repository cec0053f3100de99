#include "gibbstree/boundary_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gibbstree {

namespace {

void require_positive(std::span<const double> z) {
  for (double x : z) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("boundary field entries must be positive and finite");
    }
  }
}

void require_matching_q(const ModelParams& params, const BoundaryField& z) {
  if (z.q() != params.q) {
    throw std::invalid_argument("boundary field has q = " + std::to_string(z.q()) + " but the model has q = " +
                                std::to_string(params.q));
  }
}

int flat_index(int i, int j, int q) {
  if ((i != 1 && i != -1) || j < 1 || j > q) {
    throw std::out_of_range("boundary field index outside {-1,1} x {1..q}");
  }
  return state_index(Site{i, j}, q);
}

/// log N_t for every state t, with N_t = sum_u exp(eps(t,u)) z_u.
std::vector<double> log_numerators(const ModelParams& params, const BoundaryField& z) {
  const int q = params.q;
  const int states = 2 * q;
  const double ising = params.beta * params.alpha * params.J_I;
  const double potts = params.beta * (1.0 - params.alpha) * params.J_P;
  const auto logz = z.log_entries();
  std::vector<double> out(static_cast<std::size_t>(states));
  std::vector<double> terms(static_cast<std::size_t>(states));
  for (int t = 0; t < states; ++t) {
    const Site x = site_of(t, q);
    double top = -std::numeric_limits<double>::infinity();
    for (int u = 0; u < states; ++u) {
      const Site y = site_of(u, q);
      const double e = ising * x.sigma * y.sigma + (x.s == y.s ? potts : 0.0) + logz[static_cast<std::size_t>(u)];
      terms[static_cast<std::size_t>(u)] = e;
      top = std::max(top, e);
    }
    double acc = 0.0;
    for (double e : terms) {
      acc += std::exp(e - top);
    }
    out[static_cast<std::size_t>(t)] = top + std::log(acc);
  }
  return out;
}

/// Group values for the I1/I2 tests: z_{1,j<q}, z_{-1,j<q}.
std::pair<std::span<const double>, std::span<const double>> tied_groups(const BoundaryField& z) {
  const auto q = static_cast<std::size_t>(z.q());
  return {z.entries().subspan(0, q - 1), z.entries().subspan(q, q - 1)};
}

double relative_spread(std::span<const double> xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return (*hi - *lo) / *hi;
}

}  // namespace

BoundaryField::BoundaryField(int q) {
  if (q < 2) {
    throw std::invalid_argument("boundary field needs q >= 2");
  }
  z_.assign(static_cast<std::size_t>(2 * q), 1.0);
}

BoundaryField BoundaryField::from_entries(std::vector<double> entries) {
  if (entries.size() < 4 || entries.size() % 2 != 0) {
    throw std::invalid_argument("boundary field needs 2q entries with q >= 2");
  }
  require_positive(entries);
  if (entries.back() != 1.0) {
    throw std::invalid_argument("pinned entry z_{-1,q} must equal 1");
  }
  return BoundaryField(std::move(entries));
}

BoundaryField BoundaryField::normalized(std::span<const double> entries) {
  std::vector<double> z(entries.begin(), entries.end());
  if (z.size() < 4 || z.size() % 2 != 0) {
    throw std::invalid_argument("boundary field needs 2q entries with q >= 2");
  }
  require_positive(z);
  const double pin = z.back();
  for (double& x : z) {
    x /= pin;
  }
  z.back() = 1.0;
  return BoundaryField(std::move(z));
}

double BoundaryField::operator()(int i, int j) const { return z_[static_cast<std::size_t>(flat_index(i, j, q()))]; }

void BoundaryField::set(int i, int j, double value) {
  const int t = flat_index(i, j, q());
  if (t == 2 * q() - 1) {
    throw std::invalid_argument("z_{-1,q} is pinned to 1");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("boundary field entries must be positive and finite");
  }
  z_[static_cast<std::size_t>(t)] = value;
}

std::vector<double> BoundaryField::log_entries() const {
  std::vector<double> out;
  out.reserve(z_.size());
  for (double x : z_) {
    out.push_back(std::log(x));
  }
  return out;
}

void to_json(nlohmann::json& j, const BoundaryField& z) {
  auto rows = nlohmann::json::array();
  const int q = z.q();
  for (int t = 0; t < 2 * q; ++t) {
    const Site s = site_of(t, q);
    rows.push_back({s.sigma, s.s, z.at(t)});
  }
  j = nlohmann::json{{"z", rows}};
}

void from_json(const nlohmann::json& j, BoundaryField& z) {
  const auto& rows = j.at("z");
  if (!rows.is_array() || rows.size() < 4 || rows.size() % 2 != 0) {
    throw std::invalid_argument("\"z\" must list 2q entries");
  }
  const int q = static_cast<int>(rows.size()) / 2;
  std::vector<double> entries(rows.size(), 0.0);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != 3) {
      throw std::invalid_argument("each \"z\" entry must be [i, j, value]");
    }
    const int t = flat_index(row[0].get<int>(), row[1].get<int>(), q);
    if (seen[static_cast<std::size_t>(t)]) {
      throw std::invalid_argument("duplicate boundary field entry");
    }
    seen[static_cast<std::size_t>(t)] = true;
    entries[static_cast<std::size_t>(t)] = row[2].get<double>();
  }
  z = BoundaryField::from_entries(std::move(entries));
}

std::string to_string(InvariantSet set) {
  switch (set) {
    case InvariantSet::I1:
      return "I1";
    case InvariantSet::I2:
      return "I2";
    case InvariantSet::general:
      return "general";
  }
  return "general";
}

BoundaryField embed_I1(int q, double z) { return embed_I2(q, z, z); }

BoundaryField embed_I2(int q, double z1, double z2) {
  std::vector<double> entries(static_cast<std::size_t>(2 * q), 1.0);
  for (int j = 0; j < q - 1; ++j) {
    entries[static_cast<std::size_t>(j)] = z1;
    entries[static_cast<std::size_t>(q + j)] = z2;
  }
  return BoundaryField::from_entries(std::move(entries));
}

double tied_group_spread(const BoundaryField& z) {
  const auto [up, down] = tied_groups(z);
  return std::max(relative_spread(up), relative_spread(down));
}

double distance_to_I2(const BoundaryField& z) { return std::max(tied_group_spread(z), std::abs(z(1, z.q()) - 1.0)); }

double distance_to_I1(const BoundaryField& z) {
  const auto [up, down] = tied_groups(z);
  const double gap = std::abs(up.front() - down.front()) / std::max(up.front(), down.front());
  return std::max(distance_to_I2(z), gap);
}

InvariantSet invariant_set_of(const BoundaryField& z, double tol) {
  if (distance_to_I1(z) <= tol) {
    return InvariantSet::I1;
  }
  if (distance_to_I2(z) <= tol) {
    return InvariantSet::I2;
  }
  return InvariantSet::general;
}

BoundaryField apply_W(const ModelParams& params, const BoundaryField& z) {
  const std::vector<BoundaryField> children(static_cast<std::size_t>(params.k), z);
  return apply_W_multi(params, children);
}

BoundaryField apply_W_compact(const ModelParams& params, const BoundaryField& z) {
  require_matching_q(params, z);
  const int q = params.q;
  const double a = params.a();
  const double b = params.b();
  double up_all = 0.0;
  double down_all = 0.0;
  double denominator = 0.0;
  for (int v = 1; v <= q; ++v) {
    up_all += z(1, v);
    down_all += z(-1, v);
    if (v < q) {
      denominator += z(1, v) / a + a * z(-1, v);
    }
  }
  denominator += b * (z(1, q) / a + a);
  std::vector<double> out(static_cast<std::size_t>(2 * q), 1.0);
  for (int t = 0; t < 2 * q - 1; ++t) {
    const Site s = site_of(t, q);
    const double ai = s.sigma == 1 ? a : 1.0 / a;
    const double numerator = ai * up_all + down_all / ai + (b - 1.0) * (ai * z(1, s.s) + z(-1, s.s) / ai);
    out[static_cast<std::size_t>(t)] = std::pow(numerator / denominator, params.k);
  }
  return BoundaryField::from_entries(std::move(out));
}

BoundaryField apply_W_multi(const ModelParams& params, std::span<const BoundaryField> children) {
  if (children.empty()) {
    throw std::invalid_argument("apply_W_multi needs at least one child field");
  }
  const int states = 2 * params.q;
  std::vector<double> log_out(static_cast<std::size_t>(states), 0.0);
  for (const auto& child : children) {
    require_matching_q(params, child);
    const auto logn = log_numerators(params, child);
    const double pin = logn.back();
    for (int t = 0; t < states; ++t) {
      log_out[static_cast<std::size_t>(t)] += logn[static_cast<std::size_t>(t)] - pin;
    }
  }
  std::vector<double> out;
  out.reserve(log_out.size());
  for (double x : log_out) {
    out.push_back(std::exp(x));
  }
  out.back() = 1.0;
  for (double x : out) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::overflow_error("W output left the positive finite range");
    }
  }
  return BoundaryField::from_entries(std::move(out));
}

std::vector<BoundaryField> propagate_fields(const ModelParams& params, const CayleyTreeSlice& slice,
                                            const std::vector<std::optional<BoundaryField>>& boundary) {
  if (static_cast<int>(boundary.size()) != slice.size()) {
    throw std::invalid_argument("boundary must be indexed by the slice's vertices");
  }
  std::vector<std::optional<BoundaryField>> fields(boundary.size());
  const int n = slice.depth();
  for (int v : slice.sphere(n)) {
    const auto& leaf = boundary[static_cast<std::size_t>(v)];
    if (!leaf) {
      throw std::invalid_argument("missing leaf field at vertex " + std::to_string(v));
    }
    require_matching_q(params, *leaf);
    fields[static_cast<std::size_t>(v)] = leaf;
  }
  std::vector<BoundaryField> kids;
  for (int g = n - 1; g >= 0; --g) {
    for (int x : slice.sphere(g)) {
      kids.clear();
      for (int y : slice.children(x)) {
        kids.push_back(*fields[static_cast<std::size_t>(y)]);
      }
      fields[static_cast<std::size_t>(x)] = apply_W_multi(params, kids);
    }
  }
  std::vector<BoundaryField> out;
  out.reserve(fields.size());
  for (auto& f : fields) {
    out.push_back(std::move(*f));
  }
  return out;
}

FieldAssignment to_field_assignment(std::span<const BoundaryField> fields) {
  if (fields.empty()) {
    throw std::invalid_argument("no fields to convert");
  }
  FieldAssignment out(fields.front().q(), static_cast<int>(fields.size()));
  for (std::size_t v = 0; v < fields.size(); ++v) {
    out.set(static_cast<int>(v), fields[v].log_entries());
  }
  return out;
}

std::string to_string(IterationStatus status) {
  switch (status) {
    case IterationStatus::converged:
      return "converged";
    case IterationStatus::max_iter:
      return "max_iter";
    case IterationStatus::diverged:
      return "diverged";
  }
  return "max_iter";
}

IterationResult iterate_W(const ModelParams& params, const BoundaryField& z0, long max_iter, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("iteration tolerance must be positive");
  }
  if (max_iter < 0) {
    throw std::invalid_argument("max_iter must be non-negative");
  }
  require_matching_q(params, z0);
  IterationResult result;
  result.field = z0;
  for (long it = 0; it <= max_iter; ++it) {
    std::optional<BoundaryField> next;
    try {
      next = apply_W(params, result.field);
    } catch (const std::overflow_error&) {
      result.status = IterationStatus::diverged;
      break;
    }
    double step = 0.0;
    for (int t = 0; t < 2 * params.q; ++t) {
      step = std::max(step, std::abs(next->at(t) - result.field.at(t)));
    }
    result.last_step = step;
    if (!std::isfinite(step)) {
      result.status = IterationStatus::diverged;
      break;
    }
    if (step < tol) {
      result.status = IterationStatus::converged;
      break;
    }
    if (it == max_iter) {
      result.status = IterationStatus::max_iter;
      break;
    }
    result.field = std::move(*next);
    result.iterations = it + 1;
  }
  result.invariant_set = invariant_set_of(result.field, std::max(tol, 1e-12) * 1e3);
  return result;
}

FixedPointCheck is_fixed_point(const ModelParams& params, const BoundaryField& z, double tol) {
  const BoundaryField w = apply_W(params, z);
  double residual = 0.0;
  for (int t = 0; t < 2 * z.q(); ++t) {
    residual = std::max(residual, std::abs(w.at(t) - z.at(t)));
  }
  return {residual <= tol, residual};
}

}  // namespace gibbstree
