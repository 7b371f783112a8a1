#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "isoradial/errors.hpp"
#include "isoradial/geometry.hpp"
#include "fixtures.hpp"

using namespace isoradial;

namespace {

// Runs f, which must throw Error, and returns the code it threw.
template <typename F>
ErrorCode thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an isoradial::Error");
  return ErrorCode::internal;
}

int vertex_at(const IsoradialGraph& g, double x, double y) {
  for (int u = 0; u < g.n(); ++u)
    if (std::abs(g.position[u].x - x) < 1e-9 &&
        std::abs(g.position[u].y - y) < 1e-9)
      return u;
  FAIL("no vertex at requested position");
  return -1;
}

}  // namespace

TEST_CASE("smallest square window: counts, interior, areas") {
  auto g = fixtures::square(1.0, 1);
  CHECK(g.n() == 9);
  CHECK(g.m() == 12);
  CHECK(g.faces.size() == 4);
  CHECK(g.h == 1.0);
  CHECK(g.family == Family::square);

  int interior = 0, center = -1;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) { ++interior; center = u; }
  CHECK(interior == 1);
  REQUIRE(center >= 0);
  CHECK(g.position[center].x == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.position[center].y == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.degree(center) == 4);

  // h is the circumdiameter, so the cell side is h / sqrt(2) and the dual
  // cell of the center vertex is one full cell.
  const double side = 1.0 / std::sqrt(2.0);
  for (int e = 0; e < g.m(); ++e)
    CHECK(g.primal_length(e) == doctest::Approx(side).epsilon(1e-13));
  CHECK(g.dual_area[center] == doctest::Approx(side * side).epsilon(1e-13));
  for (int u = 0; u < g.n(); ++u)
    if (!g.is_interior(u)) CHECK(g.dual_area[u] == 0.0);

  for (const auto& f : g.faces) {
    CHECK(f.vertices.size() == 4);
    CHECK(f.circumradius == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(f.area == doctest::Approx(side * side).epsilon(1e-13));
  }
}

TEST_CASE("CSR adjacency is sorted and edge-aligned") {
  auto g = fixtures::square(1.0, 3);
  REQUIRE(static_cast<int>(g.neighbor_off.size()) == g.n() + 1);
  CHECK(g.neighbor_off[0] == 0);
  CHECK(g.neighbor_off[g.n()] == static_cast<int>(g.neighbor_ids.size()));
  CHECK(g.neighbor_ids.size() == g.edge_ids.size());
  CHECK(g.neighbor_ids.size() == 2u * static_cast<unsigned>(g.m()));

  for (int u = 0; u < g.n(); ++u) {
    auto nb = g.neighbors(u);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    auto ee = g.incident_edges(u);
    for (size_t i = 0; i < nb.size(); ++i) {
      int e = ee[i];
      CHECK(((g.edge_u[e] == u && g.edge_v[e] == nb[i]) ||
             (g.edge_v[e] == u && g.edge_u[e] == nb[i])));
    }
  }
  for (int e = 0; e < g.m(); ++e) CHECK(g.edge_u[e] < g.edge_v[e]);
}

TEST_CASE("spacing convention: square positions on the s-grid") {
  const double s = 0.5;
  auto g = fixtures::square(s, 2, /*spacing=*/true);
  // Stored h stays the circumdiameter.
  CHECK(g.h == doctest::Approx(s * std::sqrt(2.0)).epsilon(1e-15));
  for (int u = 0; u < g.n(); ++u) {
    double qx = g.position[u].x / s, qy = g.position[u].y / s;
    CHECK(std::abs(qx - std::round(qx)) < 1e-12);
    CHECK(std::abs(qy - std::round(qy)) < 1e-12);
  }
  for (int e = 0; e < g.m(); ++e)
    CHECK(g.primal_length(e) == doctest::Approx(s).epsilon(1e-13));
}

TEST_CASE("triangular side lengths under both conventions") {
  auto g = fixtures::triangular(1.0, 2);
  const double side = std::sqrt(3.0) / 2.0;  // circumdiameter 1
  for (int e = 0; e < g.m(); ++e)
    CHECK(g.primal_length(e) == doctest::Approx(side).epsilon(1e-12));
  for (const auto& f : g.faces) {
    CHECK(f.vertices.size() == 3);
    CHECK(f.circumradius == doctest::Approx(0.5).epsilon(1e-12));
  }

  auto gs = fixtures::triangular(0.25, 2, /*spacing=*/true);
  for (int e = 0; e < gs.m(); ++e)
    CHECK(gs.primal_length(e) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(gs.h == doctest::Approx(2.0 * 0.25 / std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("all families validate cleanly") {
  for (auto g : {fixtures::square(0.3, 3), fixtures::triangular(0.7, 3),
                 fixtures::rhombic(1.0, 3)}) {
    auto rep = validate_isoradial(g);
    CHECK(rep.ok);
    CHECK(rep.detail.empty());
    CHECK(rep.max_radius_deviation <= 1e-9);
    CHECK(rep.min_center_margin > 0.0);
    CHECK(rep.max_dual_orthogonality <= 1e-9);
  }
}

TEST_CASE("default rhombic tracks reproduce the square pattern rotated 45 degrees") {
  auto g = fixtures::rhombic(1.0, 3);
  CHECK(g.h == 1.0);
  auto rep = validate_isoradial(g);
  CHECK(rep.ok);

  // Side h/2 rhombi with tracks at 0 and pi/2 tile like a square lattice;
  // the primal edges are cell diagonals of length h / sqrt(2).
  const double side = 1.0 / std::sqrt(2.0);
  for (int e = 0; e < g.m(); ++e)
    CHECK(g.primal_length(e) == doctest::Approx(side).epsilon(1e-12));
  for (int e = 0; e < g.m(); ++e)
    if (g.edge_face_left[e] >= 0 && g.edge_face_right[e] >= 0)
      CHECK(g.dual_length(e) == doctest::Approx(side).epsilon(1e-12));

  auto assum = check_assumptions(g);
  CHECK(assum.c_p == doctest::Approx(side).epsilon(1e-12));
  CHECK(assum.c_d == doctest::Approx(side).epsilon(1e-12));
  CHECK(assum.max_degree == 4);

  int interior = 0;
  for (int u = 0; u < g.n(); ++u) interior += g.is_interior(u);
  CHECK(interior > 0);
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) {
      CHECK(g.degree(u) == 4);
      CHECK(g.dual_area[u] == doctest::Approx(side * side).epsilon(1e-12));
    }
}

TEST_CASE("skewed rhombic tracks stay isoradial") {
  std::vector<double> cols = {0.0, 0.15};
  std::vector<double> rows = {std::numbers::pi / 2, std::numbers::pi / 2 + 0.3};
  auto g = fixtures::rhombic(0.8, 3, cols, rows, 0.1);
  auto rep = validate_isoradial(g);
  CHECK(rep.ok);
  // Every face keeps circumradius h/2 even though edge lengths now vary.
  for (const auto& f : g.faces)
    CHECK(f.circumradius == doctest::Approx(0.4).epsilon(1e-12));
  auto assum = check_assumptions(g);
  CHECK(assum.c_p > 0.0);
  CHECK(assum.c_d > 0.0);
  CHECK(assum.kappa_empirical <= 1.998);
}

TEST_CASE("validation flags a displaced vertex") {
  auto g = fixtures::square(1.0, 2);
  int center = vertex_at(g, 0.0, 0.0);
  g.position[center].x += 0.3;
  auto rep = validate_isoradial(g);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.detail.empty());
  CHECK(rep.max_radius_deviation > 1e-3);
}

TEST_CASE("generator argument validation") {
  CHECK(thrown_code([] { fixtures::square(0.0, 2); }) ==
        ErrorCode::invalid_argument);
  CHECK(thrown_code([] { fixtures::square(-1.0, 2); }) ==
        ErrorCode::invalid_argument);
  CHECK(thrown_code([] {
          fixtures::square(std::numeric_limits<double>::quiet_NaN(), 2);
        }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([] { fixtures::square(1.0, 0); }) ==
        ErrorCode::invalid_argument);
  CHECK(thrown_code([] {
          GeneratorSpec spec;
          spec.family = Family::rhombic_tracks;
          spec.spacing_convention = true;
          spec.extent = 2;
          generate(spec);
        }) == ErrorCode::invalid_argument);
  // Track angles closer than the requested margin are a geometry defect.
  CHECK(thrown_code([] {
          fixtures::rhombic(1.0, 2, {0.0}, {0.05}, 0.1);
        }) == ErrorCode::geometry);
}

TEST_CASE("projection: exact hits and deterministic tie-breaks") {
  auto g = fixtures::square(1.0, 2, /*spacing=*/true);
  int origin = vertex_at(g, 0.0, 0.0);
  CHECK(project(g, {0.0, 0.0}) == origin);
  CHECK(project(g, {0.2, -0.1}) == origin);

  // Midpoint between (0,0) and (1,0): the smaller position wins.
  CHECK(project(g, {0.5, 0.0}) == origin);
  // Center of a cell: four-way tie, smallest (x, y) wins.
  CHECK(project(g, {0.5, 0.5}) == origin);
  int left = vertex_at(g, -1.0, 0.0);
  CHECK(project(g, {-0.5, 0.0}) == left);
}

TEST_CASE("hop and weighted distances on the square lattice") {
  auto g = fixtures::square(1.0, 4, /*spacing=*/true);
  int a = vertex_at(g, 0.0, 0.0);
  int b = vertex_at(g, 3.0, 2.0);
  CHECK(combinatorial_distance(g, a, b) == 5);
  CHECK(weighted_distance(g, a, b) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(combinatorial_distance(g, a, a) == 0);
  CHECK(weighted_distance(g, a, a) == 0.0);
}

TEST_CASE("combinatorial balls on the square lattice") {
  auto g = fixtures::square(1.0, 4, /*spacing=*/true);
  int center = vertex_at(g, 0.0, 0.0);

  auto b0 = combinatorial_ball(g, center, 0);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0] == center);

  CHECK(combinatorial_ball(g, center, 1).size() == 5);
  CHECK(combinatorial_ball(g, center, 2).size() == 13);
  CHECK(combinatorial_ball(g, center, 3).size() == 25);

  // Radius 4 reaches the window rim, which is not interior.
  CHECK(thrown_code([&] { combinatorial_ball(g, center, 4); }) ==
        ErrorCode::boundary);
  int corner = vertex_at(g, 4.0, 4.0);
  CHECK(thrown_code([&] { combinatorial_ball(g, corner, 0); }) ==
        ErrorCode::boundary);
  CHECK(thrown_code([&] { combinatorial_ball(g, center, -1); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("path-length distortion: exhaustive square window maxes at sqrt(2)") {
  auto g = fixtures::square(1.0, 15, /*spacing=*/true);
  REQUIRE(g.n() == 31 * 31);  // under the exhaustive limit
  auto rep = check_assumptions(g);
  CHECK(rep.kappa_empirical == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.kappa_empirical <= 1.998);
  CHECK(rep.c_p == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.c_d == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.max_degree == 4);
}

TEST_CASE("path-length distortion on the triangular window") {
  auto g = fixtures::triangular(1.0, 10);
  REQUIRE(g.n() <= 2500);
  auto rep = check_assumptions(g);
  CHECK(rep.kappa_empirical >= 1.0);
  CHECK(rep.kappa_empirical <= 1.998);
  // Lattice directions are 60 degrees apart, so the worst stretch is
  // 2/sqrt(3), reached between adjacent lattice rows.
  CHECK(rep.kappa_empirical ==
        doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(rep.max_degree == 6);
  CHECK(rep.c_p == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(rep.c_d == doctest::Approx(0.5).epsilon(1e-12));
}
