#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gibbstree/boundary_law.hpp"
#include "gibbstree/tigm.hpp"

using namespace gibbstree;

namespace {

// Plain double sum over (u, v) for every child, no logs.
std::vector<double> direct_W(const ModelParams& p, const std::vector<BoundaryField>& kids) {
  const int q = p.q;
  auto weight = [&](int i, int j, int u, int v) {
    return std::exp(p.beta * p.alpha * p.J_I * i * u + p.beta * (1 - p.alpha) * p.J_P * (j == v ? 1.0 : 0.0));
  };
  auto N = [&](const BoundaryField& z, int i, int j) {
    double sum = 0.0;
    for (int u : {1, -1}) {
      for (int v = 1; v <= q; ++v) {
        sum += weight(i, j, u, v) * z(u, v);
      }
    }
    return sum;
  };
  std::vector<double> out;
  for (int t = 0; t < 2 * q; ++t) {
    const Site s = site_of(t, q);
    double prod = 1.0;
    for (const auto& z : kids) {
      prod *= N(z, s.sigma, s.s) / N(z, -1, q);
    }
    out.push_back(prod);
  }
  return out;
}

BoundaryField random_field(int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> e(static_cast<std::size_t>(2 * q));
  for (auto& x : e) {
    x = std::exp(u(rng));
  }
  return BoundaryField::normalized(e);
}

ModelParams random_params(std::mt19937_64& rng, int k = 2) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> a(0.05, 0.95);
  std::uniform_int_distribution<int> q(3, 5);
  return ModelParams{q(rng), k, a(rng), 1.0, u(rng), u(rng)};
}

double sup_rel(std::span<const double> x, std::span<const double> y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m = std::max(m, std::abs(x[i] - y[i]) / std::max(std::abs(y[i]), 1.0));
  }
  return m;
}

}  // namespace

TEST_CASE("BoundaryField") {
  BoundaryField ones(3);
  CHECK(ones.entries().size() == 6);
  CHECK(ones(-1, 3) == 1.0);
  auto z = BoundaryField::from_entries({2, 3, 4, 5, 6, 1});
  CHECK(z(1, 1) == 2);
  CHECK(z(-1, 2) == 6);
  CHECK(z.at(3) == 5);
  z.set(1, 3, 7.0);
  CHECK(z(1, 3) == 7.0);
  CHECK_THROWS(z.set(-1, 3, 2.0));
  CHECK_THROWS(z.set(1, 1, 0.0));
  CHECK_THROWS(BoundaryField::from_entries({1, 1, 1, 1, 1, 2}));
  CHECK_THROWS(BoundaryField::from_entries({1, -1, 1, 1, 1, 1}));
  CHECK_THROWS(BoundaryField::from_entries({1, 1, 1, 1, 1}));
  auto n = BoundaryField::normalized(std::vector<double>{2, 4, 6, 2, 2, 2});
  CHECK(n(1, 2) == 2.0);
  CHECK(n(-1, 3) == 1.0);

  nlohmann::json j = z;
  BoundaryField back(3);
  from_json(j, back);
  CHECK(back == z);
  CHECK_THROWS(from_json(nlohmann::json::parse(R"({"z":[[-1,3,2.0]]})"), back));

  CHECK(embed_I1(3, 2.0) == BoundaryField::from_entries({2, 2, 1, 2, 2, 1}));
  CHECK(embed_I2(3, 2.0, 3.0) == BoundaryField::from_entries({2, 2, 1, 3, 3, 1}));
  CHECK(invariant_set_of(embed_I1(4, 1.7), 1e-12) == InvariantSet::I1);
  CHECK(invariant_set_of(embed_I2(4, 1.7, 0.4), 1e-12) == InvariantSet::I2);
  CHECK(invariant_set_of(BoundaryField::from_entries({1, 2, 1, 1, 1, 1}), 1e-12) == InvariantSet::general);
}

TEST_CASE("apply_W fixes the all-ones field") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_params(rng, 1 + trial % 3);
    const auto w = apply_W(p, BoundaryField(p.q));
    for (double x : w.entries()) {
      CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto check = is_fixed_point(p, BoundaryField(p.q), 1e-14);
    CHECK(check.fixed);
  }
}

TEST_CASE("apply_W against direct summation and the compact display") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_params(rng, 1 + trial % 3);
    const auto z = random_field(p.q, rng);
    const auto w = apply_W(p, z);
    const auto expected = direct_W(p, std::vector<BoundaryField>(static_cast<std::size_t>(p.k), z));
    CHECK(sup_rel(w.entries(), expected) <= 1e-13);
    CHECK(sup_rel(apply_W_compact(p, z).entries(), w.entries()) <= 1e-13);
  }
}

TEST_CASE("apply_W_multi with distinct children") {
  const ModelParams p{3, 2, 0.3, 1.0, 1.1, 0.8};
  const std::vector<BoundaryField> kids{embed_I1(3, 0.4), embed_I1(3, 2.5)};
  const auto w = apply_W_multi(p, kids);
  CHECK(sup_rel(w.entries(), direct_W(p, kids)) <= 1e-14);
  const auto w0 = apply_W_multi(p, std::vector<BoundaryField>{kids[0]});
  const auto w1 = apply_W_multi(p, std::vector<BoundaryField>{kids[1]});
  for (int t = 0; t < 6; ++t) {
    CHECK(w.at(t) == doctest::Approx(w0.at(t) * w1.at(t)).epsilon(1e-14));
  }
  const std::vector<BoundaryField> ones(3, BoundaryField(3));
  const auto w_ones = apply_W_multi(p, ones);
  for (double x : w_ones.entries()) {
    CHECK(x == doctest::Approx(1.0));
  }
  CHECK_THROWS(apply_W_multi(p, std::vector<BoundaryField>{}));
  CHECK_THROWS(apply_W(p, BoundaryField(4)));
}

TEST_CASE("invariant sets under W") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_params(rng);
    const double z = u(rng);
    CHECK(distance_to_I1(apply_W(p, embed_I1(p.q, z))) <= 1e-13);

    // Two-level fields keep their tied groups, but z_{1,q} leaves 1 by the
    // factor ((N_{1,q}) / (N_{-1,q}))^k unless a = 1 or z1 = z2.
    const double z1 = u(rng), z2 = u(rng);
    const auto w = apply_W(p, embed_I2(p.q, z1, z2));
    CHECK(tied_group_spread(w) <= 1e-13);
    const double a = p.a(), b = p.b();
    const double up = z1 * (p.q - 1) + b;
    const double down = z2 * (p.q - 1) + b;
    const double expected = std::pow((a * up + down / a) / (up / a + a * down), p.k);
    CHECK(w(1, p.q) == doctest::Approx(expected).epsilon(1e-13));
  }
  const auto flat = ModelParams::from_ab(3, 2, 1.0, 3.0);
  CHECK(distance_to_I2(apply_W(flat, embed_I2(3, 0.3, 4.0))) <= 1e-13);
}

TEST_CASE("propagate_fields") {
  const ModelParams p = ModelParams::from_weights(3, 2, 0.0, 1.0, 5.0);
  const auto slice = build_slice(2, 2);
  std::vector<std::optional<BoundaryField>> leaves(static_cast<std::size_t>(slice.size()));

  SUBCASE("all ones") {
    for (int v : slice.sphere(2)) {
      leaves[static_cast<std::size_t>(v)] = BoundaryField(3);
    }
    for (const auto& f : propagate_fields(p, slice, leaves)) {
      CHECK(distance_to_I1(f) <= 1e-15);
      CHECK(f(1, 1) == doctest::Approx(1.0));
    }
  }

  SUBCASE("a fixed point reproduces itself below the root") {
    const double z = 2.9142135623730950;
    for (int v : slice.sphere(2)) {
      leaves[static_cast<std::size_t>(v)] = embed_I1(3, z);
    }
    const auto fields = propagate_fields(p, slice, leaves);
    for (int v = 1; v < slice.size(); ++v) {
      CHECK(fields[static_cast<std::size_t>(v)](1, 1) == doctest::Approx(z).epsilon(1e-13));
    }
    // The root has k + 1 children.
    CHECK(fields[0](1, 1) == doctest::Approx(std::pow(z, 1.5)).epsilon(1e-13));

    const auto k_root = build_slice(2, 2, CayleyTreeSlice::RootDegree::k);
    std::vector<std::optional<BoundaryField>> kl(static_cast<std::size_t>(k_root.size()), embed_I1(3, z));
    for (const auto& f : propagate_fields(p, k_root, kl)) {
      CHECK(f(-1, 2) == doctest::Approx(z).epsilon(1e-13));
    }
  }

  SUBCASE("random leaves give compatible measures") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 3; ++trial) {
      const ModelParams rp{3, 2, 0.4, 1.0, 0.9, 1.3};
      for (int v : slice.sphere(2)) {
        leaves[static_cast<std::size_t>(v)] = random_field(3, rng);
      }
      const auto fields = propagate_fields(rp, slice, leaves);
      const auto report = check_compatibility(rp, slice, to_field_assignment(fields), 2);
      CHECK(report.max_deviation <= 1e-10);
    }
  }

  SUBCASE("missing leaves") {
    CHECK_THROWS(propagate_fields(p, slice, leaves));
  }
}

TEST_CASE("iterate_W") {
  const ModelParams p = ModelParams::from_weights(3, 2, 0.0, 1.0, 5.0);
  auto trivial = iterate_W(p, BoundaryField(3));
  CHECK(trivial.status == IterationStatus::converged);
  CHECK(trivial.iterations == 0);

  // The large I1 root is stable inside I1 but not across it: rounding breaks
  // the tie between s = 1 and s = 2 and the orbit settles on the small root
  // with the Potts labels 1 and 3 swapped.
  auto big = iterate_W(p, embed_I1(3, 2.8));
  CHECK(big.status == IterationStatus::converged);
  CHECK(is_fixed_point(p, big.field, 1e-12).fixed);
  const double z11 = big.field(1, 1);
  const auto relabelled = BoundaryField::from_entries({1 / z11, 1 / z11, 1, 1 / z11, 1 / z11, 1});
  CHECK(sup_rel(big.field.entries(), BoundaryField::from_entries({z11, 1, 1, z11, 1, 1}).entries()) <= 1e-12);
  CHECK(1 / z11 == doctest::Approx(0.085786437626905010).epsilon(1e-11));
  CHECK(is_fixed_point(p, relabelled, 1e-12).fixed);

  // Projected back onto I1 after every step, the large root attracts.
  auto z = embed_I1(3, 2.8);
  for (int i = 0; i < 300; ++i) {
    const auto w = apply_W(p, z);
    z = embed_I1(3, (w(1, 1) + w(1, 2) + w(-1, 1) + w(-1, 2)) / 4);
  }
  CHECK(z(1, 1) == doctest::Approx(2.9142135623730950).epsilon(1e-12));
  CHECK(is_fixed_point(p, z, 1e-12).fixed);

  CHECK_THROWS(embed_I1(3, 0.0));
  CHECK_THROWS(embed_I1(3, -1.0));

  const ModelParams hot{3, 2, 0.5, 1.0, 300.0, 300.0};
  auto blow = iterate_W(hot, BoundaryField::from_entries({1e200, 1, 1, 1, 1, 1}), 100);
  CHECK(blow.status == IterationStatus::diverged);

  auto capped = iterate_W(p, embed_I1(3, 0.5), 2);
  CHECK(capped.status == IterationStatus::max_iter);
}

TEST_CASE("is_fixed_point") {
  const ModelParams p = ModelParams::from_weights(3, 2, 0.0, 1.0, 5.0);
  const auto roots = solve_case1_k2(p).roots;
  REQUIRE(roots.size() == 3);
  for (double z : roots) {
    CHECK(is_fixed_point(p, embed_I1(3, z), 1e-10).fixed);
  }
  auto z = BoundaryField::from_entries({2, 2, 2, 2, 2, 1});
  const auto check = is_fixed_point(p, z, 1e-10);
  CHECK_FALSE(check.fixed);
  CHECK(check.residual > 0.1);
}
