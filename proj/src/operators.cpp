#include "isoradial/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "isoradial/errors.hpp"
#include "internal.hpp"
#include "util.hpp"

namespace isoradial {

WeightSet detail::weights_from_edge_lengths(const IsoradialGraph& g,
                                            const std::vector<double>& primal_len,
                                            const std::vector<double>& dual_len) {
  WeightSet w;
  const int n = g.n(), m = g.m();
  w.omega.assign(m, 0.0);
  for (int e = 0; e < m; ++e) {
    double pl = primal_len[e];
    if (pl == 0.0) throw Error(ErrorCode::geometry, "zero-length edge");
    if (g.edge_face_left[e] >= 0 && g.edge_face_right[e] >= 0)
      w.omega[e] = dual_len[e] / pl;
  }

  w.vertex_mass.assign(n, 0.0);
  for (int u = 0; u < n; ++u) {
    util::KahanSum mass;
    for (int e : g.incident_edges(u)) mass.add(w.omega[e]);
    w.vertex_mass[u] = mass.value();
  }

  w.dual_area = g.dual_area;
  w.lambda.assign(n, 0.0);
  w.mu.assign(g.neighbor_ids.size(), 0.0);
  for (int u = 0; u < n; ++u) {
    if (!g.is_interior(u)) continue;
    w.lambda[u] = w.vertex_mass[u] / (2.0 * w.dual_area[u]);
    auto edges = g.incident_edges(u);
    for (std::size_t k = 0; k < edges.size(); ++k)
      w.mu[g.neighbor_off[u] + k] = w.omega[edges[k]] / w.dual_area[u];
  }

  // realized constants; ratio bounds only over interior-incident data so a
  // window boundary cannot contaminate them
  WeightConstants& c = w.constants;
  c.c_p = std::numeric_limits<double>::infinity();
  c.c_d = std::numeric_limits<double>::infinity();
  c.kappa1 = std::numeric_limits<double>::infinity();
  c.alpha1 = std::numeric_limits<double>::infinity();
  for (int e = 0; e < m; ++e) {
    c.c_p = std::min(c.c_p, primal_len[e] / g.h);
    if (g.edge_face_left[e] >= 0 && g.edge_face_right[e] >= 0)
      c.c_d = std::min(c.c_d, dual_len[e] / g.h);
  }
  double h2 = g.h * g.h;
  for (int u = 0; u < n; ++u) {
    c.max_degree = std::max(c.max_degree, g.degree(u));
    if (!g.is_interior(u)) continue;
    c.kappa1 = std::min(c.kappa1, w.dual_area[u] / h2);
    c.kappa2 = std::max(c.kappa2, w.dual_area[u] / h2);
    for (std::size_t k = g.neighbor_off[u]; k < static_cast<std::size_t>(g.neighbor_off[u + 1]); ++k) {
      c.alpha1 = std::min(c.alpha1, h2 * w.mu[k]);
      c.alpha2 = std::max(c.alpha2, h2 * w.mu[k]);
    }
  }
  return w;
}

WeightSet compute_weights(const IsoradialGraph& g) {
  const int m = g.m();
  std::vector<double> primal(m), dual(m);
  for (int e = 0; e < m; ++e) {
    primal[e] = g.primal_length(e);
    dual[e] = g.dual_length(e);
  }
  return detail::weights_from_edge_lengths(g, primal, dual);
}

double apply_laplacian(const IsoradialGraph& g, const WeightSet& w,
                       std::span<const double> f, int u) {
  if (u < 0 || u >= g.n())
    throw Error(ErrorCode::invalid_argument, "vertex out of range");
  if (!g.is_interior(u))
    throw Error(ErrorCode::boundary, "Laplacian requires an interior vertex");
  if (static_cast<int>(f.size()) != g.n())
    throw Error(ErrorCode::invalid_argument, "function size does not match graph");
  util::KahanSum acc;
  auto nbrs = g.neighbors(u);
  auto edges = g.incident_edges(u);
  for (std::size_t k = 0; k < nbrs.size(); ++k)
    acc.add(w.omega[edges[k]] * (f[nbrs[k]] - f[u]));
  return acc.value() / w.dual_area[u];
}

namespace {

SparseGenerator build_generator(int n, GeneratorVariant variant,
                                BoundaryPolicy boundary,
                                const std::vector<char>& active,
                                const std::vector<std::vector<std::pair<int, double>>>& rows,
                                const std::vector<double>& measure) {
  SparseGenerator q;
  q.n = n;
  q.variant = variant;
  q.boundary = boundary;
  q.active = active;
  q.measure = measure;
  q.row_off.assign(n + 1, 0);
  for (int u = 0; u < n; ++u)
    q.row_off[u + 1] = q.row_off[u] + static_cast<int>(rows[u].size());
  q.col.resize(q.row_off[n]);
  q.val.resize(q.row_off[n]);
  q.diag.assign(n, 0.0);
  for (int u = 0; u < n; ++u) {
    int base = q.row_off[u];
    util::KahanSum row_sum;
    for (std::size_t k = 0; k < rows[u].size(); ++k) {
      q.col[base + k] = rows[u][k].first;
      q.val[base + k] = rows[u][k].second;
      row_sum.add(rows[u][k].second);
    }
    // diagonal = -(off-diagonal sum) keeps conservation exact in fp
    q.diag[u] = -row_sum.value();
    q.lambda_max = std::max(q.lambda_max, -q.diag[u]);
  }
  return q;
}

} // namespace

SparseGenerator assemble_generator(const IsoradialGraph& g, const WeightSet& w,
                                   GeneratorVariant variant,
                                   BoundaryPolicy boundary) {
  const int n = g.n();
  std::vector<char> active(n, 0);
  if (boundary == BoundaryPolicy::absorbing) {
    for (int u = 0; u < n; ++u) active[u] = g.is_interior(u) ? 1 : 0;
  } else {
    // closed chain: keep vertices whose whole neighborhood is interior, so
    // every surviving rate is a true interior rate and the restricted chain
    // is conservative
    for (int u = 0; u < n; ++u) {
      if (!g.is_interior(u)) continue;
      bool deep = true;
      for (int v : g.neighbors(u))
        if (!g.is_interior(v)) { deep = false; break; }
      active[u] = deep ? 1 : 0;
    }
  }

  std::vector<std::vector<std::pair<int, double>>> rows(n);
  std::vector<double> measure(n, 0.0);
  for (int u = 0; u < n; ++u) {
    if (!active[u]) continue;
    measure[u] = variant == GeneratorVariant::variable_speed
                     ? 2.0 * w.dual_area[u]
                     : 2.0 * w.vertex_mass[u];
    auto nbrs = g.neighbors(u);
    auto edges = g.incident_edges(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      int v = nbrs[k];
      if (boundary == BoundaryPolicy::closed_interior && !active[v]) continue;
      double rate = variant == GeneratorVariant::variable_speed
                        ? w.omega[edges[k]] / (2.0 * w.dual_area[u])
                        : w.omega[edges[k]] / (2.0 * w.vertex_mass[u]);
      rows[u].push_back({v, rate});
    }
  }
  return build_generator(n, variant, boundary, active, rows, measure);
}

SparseGenerator generator_from_edges(int n, const std::vector<WeightedEdge>& edges,
                                     const std::vector<double>& vertex_measure,
                                     GeneratorVariant variant) {
  if (n <= 0) throw Error(ErrorCode::invalid_argument, "empty generator");
  bool variable = variant == GeneratorVariant::variable_speed;
  if (variable && static_cast<int>(vertex_measure.size()) != n)
    throw Error(ErrorCode::invalid_argument,
                "variable-speed generator needs one measure entry per vertex");

  std::vector<double> mass(n, 0.0);
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
      throw Error(ErrorCode::invalid_argument, "bad edge");
    if (!(e.omega > 0.0))
      throw Error(ErrorCode::invalid_argument, "edge weights must be positive");
    mass[e.u] += e.omega;
    mass[e.v] += e.omega;
  }

  std::vector<std::vector<std::pair<int, double>>> rows(n);
  std::vector<double> measure(n, 0.0);
  for (int u = 0; u < n; ++u) {
    if (variable) {
      if (!(vertex_measure[u] > 0.0))
        throw Error(ErrorCode::invalid_argument, "vertex measures must be positive");
      measure[u] = 2.0 * vertex_measure[u];
    } else {
      measure[u] = 2.0 * mass[u];
    }
  }
  for (const auto& e : edges) {
    double ru = variable ? e.omega / (2.0 * vertex_measure[e.u])
                         : e.omega / (2.0 * mass[e.u]);
    double rv = variable ? e.omega / (2.0 * vertex_measure[e.v])
                         : e.omega / (2.0 * mass[e.v]);
    rows[e.u].push_back({e.v, ru});
    rows[e.v].push_back({e.u, rv});
  }
  for (auto& row : rows) std::sort(row.begin(), row.end());

  return build_generator(n, variant, BoundaryPolicy::closed_interior,
                         std::vector<char>(n, 1), rows, measure);
}

void apply_generator(const SparseGenerator& q, const double* x, double* y) {
  for (int u = 0; u < q.n; ++u) {
    if (!q.active[u]) {
      y[u] = 0.0;
      continue;
    }
    double acc = q.diag[u] * x[u];
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k)
      acc += q.val[k] * x[q.col[k]];
    y[u] = acc;
  }
}

std::vector<Triplet> generator_triplets(const SparseGenerator& q) {
  std::vector<Triplet> out;
  out.reserve(q.col.size() + q.n);
  for (int u = 0; u < q.n; ++u) {
    if (!q.active[u]) continue;
    bool diag_emitted = false;
    for (int k = q.row_off[u]; k < q.row_off[u + 1]; ++k) {
      if (!diag_emitted && q.col[k] > u) {
        out.push_back({u, u, q.diag[u]});
        diag_emitted = true;
      }
      out.push_back({u, q.col[k], q.val[k]});
    }
    if (!diag_emitted) out.push_back({u, u, q.diag[u]});
  }
  return out;
}

} // namespace isoradial
