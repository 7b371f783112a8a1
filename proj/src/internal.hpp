#pragma once

// Cross-module internals shared between the generators, the operator layer,
// and the graph-file reader. Not part of the public surface.

#include <utility>
#include <vector>

#include "isoradial/geometry.hpp"
#include "isoradial/operators.hpp"

namespace isoradial::detail {

// Raw construction data: positions, undirected edges (any order, duplicates
// tolerated), ccw face cycles. finalize_graph builds CSR adjacency, face
// records, edge-face incidence, interior flags, and dual cell areas.
struct RawGraph {
  double h = 0.0;  // circumcircle diameter
  Family family = Family::square;
  std::vector<Point> position;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> face_cycles;
};

IsoradialGraph finalize_graph(RawGraph&& raw);

// Weight construction from explicit per-edge lengths. omega[e] is
// dual_len[e] / primal_len[e] when edge e carries both faces, else 0; the
// constants block is measured from the same supplied lengths.
WeightSet weights_from_edge_lengths(const IsoradialGraph& g,
                                    const std::vector<double>& primal_len,
                                    const std::vector<double>& dual_len);

}  // namespace isoradial::detail
