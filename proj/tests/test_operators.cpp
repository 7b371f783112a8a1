#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "isoradial/errors.hpp"
#include "isoradial/geometry.hpp"
#include "isoradial/operators.hpp"
#include "fixtures.hpp"

using namespace isoradial;

namespace {

// Dense lookup of Q(u, v) from the CSR arrays; 0 when absent.
double entry(const SparseGenerator& q, int u, int v) {
  if (u == v) return q.diag[u];
  for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
    if (q.col[k] == v) return q.val[k];
  return 0.0;
}

double row_sum(const SparseGenerator& q, int u) {
  double s = q.diag[u];
  for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k) s += q.val[k];
  return s;
}

}  // namespace

TEST_CASE("square lattice weights: omega, mass, area, rate") {
  const double s = 0.5;
  auto g = fixtures::square(s, 3, /*spacing=*/true);
  auto w = compute_weights(g);

  for (int e = 0; e < g.m(); ++e)
    if (g.edge_face_left[e] >= 0 && g.edge_face_right[e] >= 0)
      CHECK(w.omega[e] == doctest::Approx(1.0).epsilon(1e-12));

  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) {
      CHECK(w.dual_area[u] == 0.0);
      CHECK(w.lambda[u] == 0.0);
      continue;
    }
    CHECK(w.vertex_mass[u] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(w.dual_area[u] == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(w.lambda[u] == doctest::Approx(2.0 / (s * s)).epsilon(1e-12));
    for (int k = g.neighbor_off[u]; k < g.neighbor_off[u + 1]; ++k)
      CHECK(w.mu[k] == doctest::Approx(1.0 / (s * s)).epsilon(1e-12));
  }

  CHECK(w.constants.c_p == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(w.constants.c_d == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(w.constants.max_degree == 4);
  // A_u = s^2 and h^2 = 2 s^2, so both area ratios sit at 1/2; the rate
  // ratio h^2 omega / A_u is 2 for every interior half-edge.
  CHECK(w.constants.kappa1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.constants.kappa2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.constants.alpha1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w.constants.alpha2 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("triangular lattice weights") {
  auto g = fixtures::triangular(1.0, 3);
  auto w = compute_weights(g);
  const double s = std::sqrt(3.0) / 2.0;  // side at circumdiameter 1

  for (int e = 0; e < g.m(); ++e)
    if (g.edge_face_left[e] >= 0 && g.edge_face_right[e] >= 0)
      CHECK(w.omega[e] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));

  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) continue;
    CHECK(g.degree(u) == 6);
    CHECK(w.vertex_mass[u] == doctest::Approx(6.0 / std::sqrt(3.0)).epsilon(1e-12));
    // Hexagonal dual cell built from the six circumcenters.
    CHECK(w.dual_area[u] ==
          doctest::Approx(std::sqrt(3.0) / 2.0 * s * s).epsilon(1e-12));
    CHECK(w.lambda[u] == doctest::Approx(2.0 / (s * s)).epsilon(1e-12));
  }
}

TEST_CASE("laplacian reproduces the quadratic identity and kills affine functions") {
  auto graphs = std::vector<IsoradialGraph>{};
  graphs.push_back(fixtures::square(0.7, 3));
  graphs.push_back(fixtures::triangular(0.9, 3));
  graphs.push_back(fixtures::rhombic(1.1, 3, {0.0, 0.2}, {1.7, 1.9}, 0.05));

  const double a = 1.3, b = 0.7, c = -0.2;
  for (const auto& g : graphs) {
    auto w = compute_weights(g);
    std::vector<double> quad(g.n()), affine(g.n());
    for (int u = 0; u < g.n(); ++u) {
      double x = g.position[u].x, y = g.position[u].y;
      quad[u] = a * x * x + b * x * y + c * y * y;
      affine[u] = 0.4 * x - 2.1 * y + 3.0;
    }
    for (int u = 0; u < g.n(); ++u) {
      if (!g.is_interior(u)) continue;
      CHECK(apply_laplacian(g, w, quad, u) ==
            doctest::Approx(2.0 * (a + c)).epsilon(1e-9));
      CHECK(apply_laplacian(g, w, affine, u) ==
            doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("variable-speed generator on the unit-spacing square lattice") {
  auto g = fixtures::square(1.0, 3, /*spacing=*/true);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::variable_speed);

  CHECK(q.n == g.n());
  CHECK(q.boundary == BoundaryPolicy::absorbing);
  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) {
      CHECK_FALSE(q.active[u]);
      CHECK(q.row_off[u] == q.row_off[u + 1]);  // no stored entries
      CHECK(q.diag[u] == 0.0);
      continue;
    }
    CHECK(q.active[u]);
    CHECK(q.diag[u] == doctest::Approx(-2.0).epsilon(1e-12));
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
      CHECK(q.val[k] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(q.row_off[u + 1] - q.row_off[u] == 4);
    CHECK(row_sum(q, u) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(q.measure[u] == doctest::Approx(2.0).epsilon(1e-12));  // 2 A_u
  }
  CHECK(q.lambda_max == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant-speed generator on the unit-spacing square lattice") {
  auto g = fixtures::square(1.0, 3, /*spacing=*/true);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::constant_speed);

  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) continue;
    CHECK(q.diag[u] == doctest::Approx(-0.5).epsilon(1e-12));
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
      CHECK(q.val[k] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(q.measure[u] == doctest::Approx(8.0).epsilon(1e-12));  // 2 m_u
  }
  CHECK(q.lambda_max == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("closed-interior policy keeps only deep vertices active") {
  auto g = fixtures::square(1.0, 3, /*spacing=*/true);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::variable_speed,
                              BoundaryPolicy::closed_interior);

  // Active iff the vertex and all its neighbors are interior: |i|,|j| <= 1
  // in a window of extent 3 (interior band |i|,|j| <= 2).
  int active = 0;
  for (int u = 0; u < g.n(); ++u) active += q.active[u] ? 1 : 0;
  CHECK(active == 9);

  for (int u = 0; u < g.n(); ++u) {
    if (!q.active[u]) continue;
    CHECK(std::abs(g.position[u].x) <= 1.0 + 1e-12);
    CHECK(std::abs(g.position[u].y) <= 1.0 + 1e-12);
    // Neighbors outside the active block are dropped and the diagonal keeps
    // only the surviving rates: rows sum to zero (reflecting closure).
    CHECK(row_sum(q, u) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
      CHECK(q.active[q.col[k]]);
  }
  // The center keeps all four neighbors, a corner of the block only two.
  int center = -1, corner = -1;
  for (int u = 0; u < g.n(); ++u) {
    if (std::abs(g.position[u].x) < 1e-9 && std::abs(g.position[u].y) < 1e-9)
      center = u;
    if (std::abs(g.position[u].x - 1.0) < 1e-9 &&
        std::abs(g.position[u].y - 1.0) < 1e-9)
      corner = u;
  }
  REQUIRE(center >= 0);
  REQUIRE(corner >= 0);
  CHECK(q.row_off[center + 1] - q.row_off[center] == 4);
  CHECK(q.diag[center] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(q.row_off[corner + 1] - q.row_off[corner] == 2);
  CHECK(q.diag[corner] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("generator is self-adjoint in its measure") {
  for (auto variant :
       {GeneratorVariant::variable_speed, GeneratorVariant::constant_speed}) {
    auto g = fixtures::triangular(1.0, 3);
    auto w = compute_weights(g);
    auto q = assemble_generator(g, w, variant);
    for (int u = 0; u < q.n; ++u) {
      if (!q.active[u]) continue;
      for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k) {
        int v = q.col[k];
        if (!q.active[v]) continue;
        CHECK(q.measure[u] * q.val[k] ==
              doctest::Approx(q.measure[v] * entry(q, v, u)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("apply_generator matches explicit row evaluation") {
  auto g = fixtures::square(0.8, 3);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::variable_speed);

  std::vector<double> x(g.n()), y(g.n(), 123.0);
  for (int u = 0; u < g.n(); ++u)
    x[u] = std::sin(3.0 * u) + 0.25 * g.position[u].x;
  apply_generator(q, x.data(), y.data());

  for (int u = 0; u < g.n(); ++u) {
    if (!q.active[u]) {
      CHECK(y[u] == 0.0);
      continue;
    }
    double expect = q.diag[u] * x[u];
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
      expect += q.val[k] * x[q.col[k]];
    CHECK(y[u] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("triplets enumerate exactly the stored entries") {
  auto g = fixtures::square(1.0, 2);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::constant_speed);
  auto trips = generator_triplets(q);

  std::map<std::pair<int, int>, double> dense;
  for (const auto& t : trips) {
    CHECK(dense.emplace(std::pair{t.row, t.col}, t.value).second);  // no dups
    CHECK(q.active[t.row]);
  }
  size_t expected = 0;
  for (int u = 0; u < q.n; ++u) {
    if (!q.active[u]) continue;
    expected += 1 + static_cast<size_t>(q.row_off[u + 1] - q.row_off[u]);
    CHECK(dense.at({u, u}) == q.diag[u]);
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
      CHECK(dense.at({u, q.col[k]}) == q.val[k]);
  }
  CHECK(trips.size() == expected);

  // Row-major ordering.
  for (size_t i = 1; i < trips.size(); ++i) {
    bool ordered = trips[i - 1].row < trips[i].row ||
                   (trips[i - 1].row == trips[i].row &&
                    trips[i - 1].col < trips[i].col);
    CHECK(ordered);
  }
}

TEST_CASE("generator_from_edges builds the three-point chain") {
  std::vector<WeightedEdge> edges = {{0, 1, 2.0}, {1, 2, 3.0}};
  std::vector<double> area = {1.0, 0.5, 2.0};

  auto q = generator_from_edges(3, edges, area, GeneratorVariant::variable_speed);
  CHECK(q.boundary == BoundaryPolicy::closed_interior);
  for (int u = 0; u < 3; ++u) CHECK(q.active[u]);
  CHECK(entry(q, 0, 1) == doctest::Approx(2.0 / (2.0 * 1.0)).epsilon(1e-15));
  CHECK(entry(q, 1, 0) == doctest::Approx(2.0 / (2.0 * 0.5)).epsilon(1e-15));
  CHECK(entry(q, 1, 2) == doctest::Approx(3.0 / (2.0 * 0.5)).epsilon(1e-15));
  CHECK(entry(q, 2, 1) == doctest::Approx(3.0 / (2.0 * 2.0)).epsilon(1e-15));
  for (int u = 0; u < 3; ++u)
    CHECK(row_sum(q, u) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

  auto qc = generator_from_edges(3, edges, {}, GeneratorVariant::constant_speed);
  CHECK(entry(qc, 0, 1) == doctest::Approx(0.5).epsilon(1e-15));   // omega/(2 m), m=2
  CHECK(entry(qc, 1, 0) == doctest::Approx(0.2).epsilon(1e-15));   // m=5
  CHECK(entry(qc, 1, 2) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(qc.diag[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(qc.diag[1] == doctest::Approx(-0.5).epsilon(1e-15));

  CHECK_THROWS_AS(
      generator_from_edges(3, edges, {1.0, 0.0, 1.0},
                           GeneratorVariant::variable_speed),
      Error);
  CHECK_THROWS_AS(
      generator_from_edges(2, edges, {1.0, 1.0},
                           GeneratorVariant::variable_speed),
      Error);
  CHECK_THROWS_AS(
      generator_from_edges(3, {{0, 0, 1.0}}, area,
                           GeneratorVariant::variable_speed),
      Error);
}

TEST_CASE("interior-subgraph helper matches absorbing off-diagonal rates") {
  auto g = fixtures::square(1.0, 3, /*spacing=*/true);
  auto w = compute_weights(g);
  auto qa = assemble_generator(g, w, GeneratorVariant::variable_speed);
  auto qi = fixtures::interior_subgraph_generator(
      g, w, GeneratorVariant::variable_speed);

  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) continue;
    for (int k = qa.row_off[u]; k < qa.row_off[u + 1]; ++k) {
      int v = qa.col[k];
      if (!g.is_interior(v)) continue;
      CHECK(entry(qi, u, v) == doctest::Approx(qa.val[k]).epsilon(1e-13));
    }
    // Conservative: the subgraph row sums to zero even at the interior rim.
    CHECK(row_sum(qi, u) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  }
}
