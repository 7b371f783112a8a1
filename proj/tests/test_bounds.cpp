#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "isoradial/bounds.hpp"
#include "isoradial/errors.hpp"
#include "isoradial/geometry.hpp"
#include "isoradial/kernel.hpp"
#include "isoradial/operators.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace isoradial;

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274;

int vertex_at(const IsoradialGraph& g, double x, double y) {
  for (int u = 0; u < g.n(); ++u)
    if (std::abs(g.position[u].x - x) < 1e-9 &&
        std::abs(g.position[u].y - y) < 1e-9)
      return u;
  FAIL("no vertex at requested position");
  return -1;
}

double interior_mu_max(const IsoradialGraph& g, const WeightSet& w) {
  double hi = 0.0;
  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) continue;
    for (int k = g.neighbor_off[u]; k < g.neighbor_off[u + 1]; ++k)
      hi = std::max(hi, w.mu[k]);
  }
  return hi;
}

int interior_max_degree(const IsoradialGraph& g) {
  int m = 0;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) m = std::max(m, g.degree(u));
  return m;
}

// Rebuilds both bound values from exhaustively enumerated path products.
PathProductBound bounds_from_enumeration(const IsoradialGraph& g,
                                         const WeightSet& w, int x, int y,
                                         double t, int n_max) {
  const auto best = oracle::best_path_products(g, w, x, y, n_max);
  const int dc = combinatorial_distance(g, x, y);
  const double mu_hi = interior_mu_max(g, w);
  const double z = mu_hi * interior_max_degree(g) * t;

  double best_lower = -std::numeric_limits<double>::infinity();
  double best_factor = -std::numeric_limits<double>::infinity();
  for (int n = dc; n <= n_max; ++n) {
    if (best[n] <= 0.0) continue;
    best_lower = std::max(best_lower,
                          n * std::log(t / n) + std::log(best[n]));
  }
  for (int n = 1; n <= n_max; ++n) {
    if (best[n] <= 0.0) continue;
    best_factor =
        std::max(best_factor, std::log(best[n]) - n * std::log(mu_hi));
  }

  PathProductBound out;
  out.log_lower = -z - kLogSqrt2Pi + best_lower;
  out.log_upper = z + 1.0 + std::min(best_factor, 0.0) +
                  dc * (1.0 + std::log(z) - std::log(double(dc)));
  return out;
}

}  // namespace

TEST_CASE("path-product bounds agree with exhaustive enumeration") {
  SUBCASE("uniform-rate square window") {
    auto g = fixtures::square(1.0, 3, /*spacing=*/true);
    auto w = compute_weights(g);
    int x = vertex_at(g, 0.0, 0.0);
    int y = vertex_at(g, 2.0, 1.0);
    const double t = 0.6;
    const int n_max = 7;

    auto got = metzger_bounds(g, w, x, y, t, n_max);
    auto want = bounds_from_enumeration(g, w, x, y, t, n_max);
    CHECK(got.cutoff_certified);
    CHECK(got.log_lower == doctest::Approx(want.log_lower).epsilon(1e-12));
    CHECK(got.log_upper == doctest::Approx(want.log_upper).epsilon(1e-12));
    CHECK(got.n_lower == 3);  // per-step factor < 1: shortest length wins
    CHECK(got.n_upper == 3);
    CHECK(got.n_max == 7);
  }

  SUBCASE("skewed rhombic window with non-uniform rates") {
    auto g = fixtures::rhombic(1.0, 3, {0.0, 0.35}, {1.4, 1.9}, 0.1);
    auto w = compute_weights(g);
    std::vector<int> interior_ids;
    for (int u = 0; u < g.n(); ++u)
      if (g.is_interior(u)) interior_ids.push_back(u);
    REQUIRE(interior_ids.size() >= 2);
    int x = interior_ids.front(), y = interior_ids.back();
    for (int u : interior_ids)
      if (combinatorial_distance(g, x, u) == 2) y = u;
    REQUIRE(x != y);

    const int n_max = static_cast<int>(interior_ids.size()) - 1;
    const double t = 0.8;

    auto got = metzger_bounds(g, w, x, y, t, n_max);
    auto want = bounds_from_enumeration(g, w, x, y, t, n_max);
    CHECK(got.log_lower == doctest::Approx(want.log_lower).epsilon(1e-10));
    CHECK(got.log_upper == doctest::Approx(want.log_upper).epsilon(1e-10));
  }
}

TEST_CASE("closed form on the uniform square: upper bound with zero path factor") {
  auto g = fixtures::square(1.0, 3, /*spacing=*/true);
  auto w = compute_weights(g);
  int x = vertex_at(g, 0.0, 0.0);
  int y = vertex_at(g, 1.0, 1.0);
  const double t = 0.5;
  auto b = metzger_bounds(g, w, x, y, t);
  // mu = 1, degree 4: z = 4t, and the best path factor is exactly 1.
  const double z = 4.0 * t;
  CHECK(b.log_upper ==
        doctest::Approx(z + 1.0 + 2.0 * (1.0 + std::log(z) - std::log(2.0)))
            .epsilon(1e-13));
  CHECK(b.cutoff_certified);
}

TEST_CASE("bounds sandwich the true kernel on absorbing and conservative chains") {
  auto g = fixtures::square(1.0, 3, /*spacing=*/true);
  auto w = compute_weights(g);
  std::vector<int> interior;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) interior.push_back(u);

  auto qa = assemble_generator(g, w, GeneratorVariant::variable_speed);
  auto qi = fixtures::interior_subgraph_generator(
      g, w, GeneratorVariant::variable_speed);

  for (double t : {0.1, 1.0}) {
    auto Ma = oracle::dense_heat_kernel(qa, t);
    auto Mi = oracle::dense_heat_kernel(qi, t);
    for (int x : interior)
      for (int y : interior) {
        if (x == y) continue;
        auto b = metzger_bounds(g, w, x, y, t);
        CHECK(b.cutoff_certified);
        for (double p : {Ma(x, y), Mi(x, y)}) {
          REQUIRE(p > 0.0);
          CHECK(std::log(p) >= b.log_lower - 1e-9);
          CHECK(std::log(p) <= b.log_upper + 1e-9);
        }
      }
  }
}

TEST_CASE("bounds sandwich the triangular kernel") {
  auto g = fixtures::triangular(1.0, 2);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::variable_speed);
  std::vector<int> interior;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) interior.push_back(u);
  const double t = 0.5;
  auto M = oracle::dense_heat_kernel(q, t);
  for (int x : interior)
    for (int y : interior) {
      if (x == y) continue;
      auto b = metzger_bounds(g, w, x, y, t);
      CHECK(std::log(M(x, y)) >= b.log_lower - 1e-9);
      CHECK(std::log(M(x, y)) <= b.log_upper + 1e-9);
    }
}

TEST_CASE("path-product bound argument errors") {
  auto g = fixtures::square(1.0, 2, /*spacing=*/true);
  auto w = compute_weights(g);
  int x = vertex_at(g, 0.0, 0.0);
  int y = vertex_at(g, 1.0, 0.0);
  CHECK_THROWS_AS(metzger_bounds(g, w, x, x, 1.0), Error);
  CHECK_THROWS_AS(metzger_bounds(g, w, x, y, -1.0), Error);
  // n_max below the distance cannot express any admissible path length.
  int far = vertex_at(g, 2.0, 0.0);
  CHECK_THROWS_AS(metzger_bounds(g, w, x, far, 1.0, 1), Error);
  // t = 0 is allowed and collapses both envelopes.
  auto b0 = metzger_bounds(g, w, x, y, 0.0);
  CHECK(b0.log_lower == -std::numeric_limits<double>::infinity());
}

TEST_CASE("single-length lower bound stays below the true kernel") {
  auto g = fixtures::square(1.0, 6, /*spacing=*/true);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::variable_speed);
  int x = vertex_at(g, 0.0, 0.0);
  int y = vertex_at(g, 3.0, 0.0);

  SUBCASE("unit h: walk time equals t") {
    const double t = 1.0;
    auto M = oracle::dense_heat_kernel(q, t);
    double lb = improved_lower_bound(g, w, x, y, t, 1.0, 0.5);
    CHECK(lb <= std::log(M(x, y)) + 1e-12);
  }
  SUBCASE("h and beta set the walk time") {
    const double t = 2.0, h = 0.5, beta = 1.5;
    const double s = std::pow(h, beta) * t;
    auto M = oracle::dense_heat_kernel(q, s);
    double lb = improved_lower_bound(g, w, x, y, t, h, beta);
    CHECK(lb <= std::log(M(x, y)) + 1e-12);
  }
  SUBCASE("outside the single-length regime the call refuses") {
    auto code = [&](double t) {
      try {
        improved_lower_bound(g, w, x, y, t, 1.0, 0.5);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::internal;
    };
    // d^c = 3, mu_min = 1: t = 5 puts the optimum past the shortest length.
    CHECK(code(5.0) == ErrorCode::invalid_argument);
    CHECK_THROWS_AS(improved_lower_bound(g, w, x, x, 1.0, 1.0, 0.5), Error);
  }
}

TEST_CASE("ball volume sums the vertex masses") {
  auto g = fixtures::square(1.0, 5, /*spacing=*/true);
  auto w = compute_weights(g);
  int center = vertex_at(g, 0.0, 0.0);
  CHECK(volume(g, w, center, 0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(volume(g, w, center, 1) == doctest::Approx(20.0).epsilon(1e-13));
  CHECK(volume(g, w, center, 2) == doctest::Approx(52.0).epsilon(1e-13));
  CHECK(volume(g, w, center, 3) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK_THROWS_AS(volume(g, w, center, -1), Error);
  CHECK_THROWS_AS(volume(g, w, center, 5), Error);  // clipped ball

  auto gt = fixtures::triangular(1.0, 3);
  auto wt = compute_weights(gt);
  int c = project(gt, {0.0, 0.0});
  CHECK(volume(gt, wt, c, 1) ==
        doctest::Approx(14.0 * std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("volume growth fits a quadratic exponent") {
  auto g = fixtures::square(1.0, 52, /*spacing=*/true);
  auto w = compute_weights(g);
  int center = vertex_at(g, 0.0, 0.0);
  auto fit = volume_growth_fit(g, w, center, 5, 50);
  CHECK(fit.exponent >= 1.9);
  CHECK(fit.exponent <= 2.1);
  CHECK(fit.max_residual <= 0.2);
  // vol(n) = 4 (2n^2 + 2n + 1): the intercept approaches log 8.
  CHECK(fit.intercept >= std::log(4.0));
  CHECK(fit.intercept <= std::log(16.0));

  auto small = fixtures::square(1.0, 6, /*spacing=*/true);
  auto ws = compute_weights(small);
  CHECK_THROWS_AS(
      volume_growth_fit(small, ws, vertex_at(small, 0.0, 0.0), 2, 10), Error);
}

TEST_CASE("poincare constant matches the dense generalized eigenvalue") {
  auto g = fixtures::square(1.0, 8, /*spacing=*/true);
  auto w = compute_weights(g);
  int u0 = vertex_at(g, 0.0, 0.0);

  for (int n : {1, 2}) {
    auto outer = combinatorial_ball(g, u0, 2 * n);
    auto inner = combinatorial_ball(g, u0, n);
    const int N = static_cast<int>(outer.size());
    std::vector<int> local(g.n(), -1);
    for (int i = 0; i < N; ++i) local[outer[i]] = i;

    double total_mass = 0.0;
    for (int v : inner) total_mass += w.vertex_mass[v];
    Eigen::VectorXd mhat = Eigen::VectorXd::Zero(N);
    for (int v : inner) mhat(local[v]) = w.vertex_mass[v] / total_mass;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int v : inner) {
      Eigen::VectorXd e = -mhat;
      e(local[v]) += 1.0;
      A += w.vertex_mass[v] * e * e.transpose();
    }

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
      const int v = outer[i];
      auto nbrs = g.neighbors(v);
      auto eids = g.incident_edges(v);
      for (size_t k = 0; k < nbrs.size(); ++k) {
        const int j = local[nbrs[k]];
        if (j < 0) continue;
        // Directed pass touches each undirected edge twice.
        Eigen::VectorXd d = Eigen::VectorXd::Zero(N);
        d(i) = 1.0;
        d(j) = -1.0;
        B += w.omega[eids[k]] * d * d.transpose();
      }
    }
    B *= static_cast<double>(n) * static_cast<double>(n);

    double expected = oracle::max_generalized_eigenvalue_mod_constants(A, B);
    double got = poincare_constant(g, w, u0, n);
    CHECK(got == doctest::Approx(expected).epsilon(1e-8));
    CHECK(got > 0.0);
  }
}

TEST_CASE("poincare constant ignores the mesh scale on the square lattice") {
  int n = 2;
  double reference = 0.0;
  for (double h : {1.0, 0.25}) {
    auto g = fixtures::square(h, 8, /*spacing=*/true);
    auto w = compute_weights(g);
    double c = poincare_constant(g, w, project(g, {0.0, 0.0}), n);
    if (reference == 0.0)
      reference = c;
    else
      CHECK(c == doctest::Approx(reference).epsilon(1e-10));
  }
  // The circumdiameter convention only rescales the embedding, not the
  // weights, so the constant is unchanged there too.
  auto g = fixtures::square(1.0, 8);
  auto w = compute_weights(g);
  double c = poincare_constant(g, w, project(g, {0.0, 0.0}), n);
  CHECK(c == doctest::Approx(reference).epsilon(1e-10));
}

TEST_CASE("poincare argument and window errors") {
  auto g = fixtures::square(1.0, 4, /*spacing=*/true);
  auto w = compute_weights(g);
  int u0 = vertex_at(g, 0.0, 0.0);
  CHECK_THROWS_AS(poincare_constant(g, w, u0, 0), Error);
  CHECK_THROWS_AS(poincare_constant(g, w, u0, 2), Error);  // B_4 clipped
}

TEST_CASE("gaussian lower fit certifies constants that really bound the kernel") {
  auto g = fixtures::square(1.0, 24, /*spacing=*/true);
  auto w = compute_weights(g);
  auto q = assemble_generator(g, w, GeneratorVariant::constant_speed);
  int c = vertex_at(g, 0.0, 0.0);

  std::vector<VertexPair> pairs = {{c, vertex_at(g, 1.0, 0.0)},
                                   {c, vertex_at(g, 2.0, 1.0)},
                                   {c, vertex_at(g, 0.0, 2.0)}};
  std::vector<double> times = {1.0, 2.0, 4.0};

  auto fit = gaussian_lower_fit(q, g, w, pairs, times);
  REQUIRE(fit.holds);
  CHECK(fit.samples_used > 0);
  CHECK(fit.worst_slack >= 0.0);
  CHECK(fit.c_lower >= 1e-6);
  CHECK(fit.c_lower <= 1.0);
  CHECK(fit.C_lower >= 0.25);
  CHECK(fit.C_lower <= 10.0);

  // Re-derive the bound sample by sample.
  for (const auto& pr : pairs) {
    int dc = combinatorial_distance(g, pr.u, pr.v);
    for (double t : times) {
      if (t < dc) continue;
      auto e = kernel_log_entry(q, pr.u, pr.v, t, 1e-8);
      REQUIRE_FALSE(e.below_floor);
      double vol = volume(g, w, pr.u, static_cast<int>(std::floor(std::sqrt(t))));
      double rhs = std::log(fit.c_lower) + std::log(w.vertex_mass[pr.v]) -
                   std::log(vol) - fit.C_lower * dc * dc / t;
      CHECK(e.log_value >= rhs - 1e-6);
    }
  }

  auto refit = gaussian_lower_fit(q, g, w, pairs, times);
  CHECK(refit.c_lower == fit.c_lower);
  CHECK(refit.C_lower == fit.C_lower);
  CHECK(refit.worst_slack == fit.worst_slack);

  auto qv = assemble_generator(g, w, GeneratorVariant::variable_speed);
  CHECK_THROWS_AS(gaussian_lower_fit(qv, g, w, pairs, times), Error);

  // Nothing survives when every time sits below the distance.
  auto none = gaussian_lower_fit(q, g, w, {{c, vertex_at(g, 3.0, 3.0)}}, {1.0});
  CHECK_FALSE(none.holds);
  CHECK(none.samples_used == 0);
}
