#pragma once

#include <span>
#include <vector>

#include "isoradial/geometry.hpp"

namespace isoradial {

// Geometric constants of the embedded window. Ratios are taken over edges
// with both endpoints interior so window truncation cannot contaminate them.
struct WeightConstants {
  double c_p = 0.0;      // min |e| / h
  double c_d = 0.0;      // min |e*| / h
  int max_degree = 0;    // M
  double kappa1 = 0.0;   // min_u A_u / h^2 over interior u
  double kappa2 = 0.0;   // max_u A_u / h^2 over interior u
  double alpha1 = 0.0;   // min_{u interior, v~u} h^2 * omega_uv / A_u
  double alpha2 = 0.0;   // max of the same ratio
};

struct WeightSet {
  std::vector<double> omega;          // per undirected edge: |e*| / |e|
  std::vector<double> vertex_mass;    // m_u = sum of incident omega
  std::vector<double> dual_area;      // A_u, area of the dual cell (interior u only; 0 otherwise)
  std::vector<double> lambda;         // m_u / (2 A_u) for interior u, 0 otherwise
  std::vector<double> mu;             // directed: mu[k] = omega_e / A_u for half-edge k of u
                                      // (CSR-aligned with IsoradialGraph::neighbor_ids; 0 if u not interior)
  WeightConstants constants;
};

WeightSet compute_weights(const IsoradialGraph& g);

// (1/A_u) sum_{v ~ u} omega_uv (f(v) - f(u)). Quadratics a x^2 + b xy + c y^2
// land on the constant 2(a+c); affine functions land on 0.
double apply_laplacian(const IsoradialGraph& g, const WeightSet& w,
                       std::span<const double> f, int u);

enum class GeneratorVariant {
  variable_speed,   // Q(u,v) = omega_uv / (2 A_u), Q(u,u) = -lambda(u)
  constant_speed    // Q(u,v) = omega_uv / (2 m_u), Q(u,u) = -1/2
};

enum class BoundaryPolicy {
  absorbing,        // rows of non-interior vertices are zero (walk killed on exit)
  closed_interior   // restrict to vertices whose neighbors are all interior; reflecting diagonal
};

// Row-sparse generator. `active[u] == 0` marks a zeroed (absorbing) or
// excluded row; values of inactive rows are absent from the CSR arrays.
struct SparseGenerator {
  int n = 0;
  GeneratorVariant variant = GeneratorVariant::variable_speed;
  BoundaryPolicy boundary = BoundaryPolicy::absorbing;
  std::vector<int> row_off;      // size n+1
  std::vector<int> col;
  std::vector<double> val;       // off-diagonal entries, row-sorted by col
  std::vector<double> diag;      // Q(u,u); 0 for inactive rows
  std::vector<char> active;
  double lambda_max = 0.0;       // max_u -Q(u,u) over active rows

  // Measure making Q self-adjoint: 2 A_u (variable speed) or 2 m_u (constant).
  std::vector<double> measure;
};

SparseGenerator assemble_generator(const IsoradialGraph& g, const WeightSet& w,
                                   GeneratorVariant variant,
                                   BoundaryPolicy boundary = BoundaryPolicy::absorbing);

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double omega = 0.0;
};

// Generator on an arbitrary weighted graph (used by tests and tools to build
// chains that are not windows of isoradial graphs). vertex_measure supplies
// A_u for the variable-speed variant and is ignored for constant speed.
SparseGenerator generator_from_edges(int n, const std::vector<WeightedEdge>& edges,
                                     const std::vector<double>& vertex_measure,
                                     GeneratorVariant variant);

// y = Q x restricted to active rows (inactive rows of y are set to 0).
void apply_generator(const SparseGenerator& q, const double* x, double* y);

struct Triplet {
  int row, col;
  double value;
};

std::vector<Triplet> generator_triplets(const SparseGenerator& q);

} // namespace isoradial
