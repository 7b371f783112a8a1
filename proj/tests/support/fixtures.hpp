#pragma once
// Shared graph builders for the test suites.

#include <vector>

#include "isoradial/geometry.hpp"
#include "isoradial/operators.hpp"

namespace fixtures {

inline isoradial::IsoradialGraph square(double h, int extent,
                                        bool spacing = false) {
  isoradial::GeneratorSpec spec;
  spec.family = isoradial::Family::square;
  spec.h = h;
  spec.extent = extent;
  spec.spacing_convention = spacing;
  return isoradial::generate(spec);
}

inline isoradial::IsoradialGraph triangular(double h, int extent,
                                            bool spacing = false) {
  isoradial::GeneratorSpec spec;
  spec.family = isoradial::Family::triangular;
  spec.h = h;
  spec.extent = extent;
  spec.spacing_convention = spacing;
  return isoradial::generate(spec);
}

inline isoradial::IsoradialGraph rhombic(double h, int extent,
                                         std::vector<double> col_angles = {},
                                         std::vector<double> row_angles = {},
                                         double margin = 0.0) {
  isoradial::GeneratorSpec spec;
  spec.family = isoradial::Family::rhombic_tracks;
  spec.h = h;
  spec.extent = extent;
  spec.col_angles = std::move(col_angles);
  spec.row_angles = std::move(row_angles);
  spec.track_margin = margin;
  return isoradial::generate(spec);
}

// The conservative walk on the interior subgraph: same off-diagonal rates
// as the absorbing window generator, nothing flowing off the interior. Its
// jump chains are exactly the interior paths.
inline isoradial::SparseGenerator interior_subgraph_generator(
    const isoradial::IsoradialGraph& g, const isoradial::WeightSet& w,
    isoradial::GeneratorVariant variant) {
  std::vector<isoradial::WeightedEdge> edges;
  for (int e = 0; e < g.m(); ++e) {
    const int u = g.edge_u[e], v = g.edge_v[e];
    if (g.is_interior(u) && g.is_interior(v))
      edges.push_back({u, v, w.omega[e]});
  }
  // Vertices outside the subgraph keep a placeholder measure; their rows
  // have no edges, so the value never enters a rate.
  std::vector<double> measure(g.n(), 1.0);
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) measure[u] = g.dual_area[u];
  return isoradial::generator_from_edges(g.n(), edges, measure, variant);
}

}  // namespace fixtures
