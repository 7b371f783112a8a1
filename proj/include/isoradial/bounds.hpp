#pragma once

#include <utility>
#include <vector>

#include "isoradial/geometry.hpp"
#include "isoradial/kernel.hpp"
#include "isoradial/operators.hpp"

namespace isoradial {

// Path-product sandwich on log p_t(x, y) for the variable-speed kernel:
// optimize sup over paths gamma of prod_e (t mu_e / n) across path lengths
// n in [d^c(x,y), n_max] by max-plus dynamic programming. Natural logs.
struct PathProductBound {
  double log_lower = 0.0;
  double log_upper = 0.0;
  int n_lower = 0;               // maximizing length inside the lower envelope
  int n_upper = 0;
  int n_max = 0;
  bool cutoff_certified = false; // lengths beyond n_max provably cannot raise the max
};

// n_max <= 0 picks d^c + 4 ceil(lambda_max t) + 20. The cutoff is certified
// when the best per-step factor at n_max has dropped below 1.
PathProductBound metzger_bounds(const IsoradialGraph& g, const WeightSet& w,
                                int x, int y, double t, int n_max = 0);

// Single-length lower bound on log p at walk time s = h^beta t:
//   -alpha2 h^-2 M s - log sqrt(2 pi) + d^c log(alpha1 h^(beta-2) t / d^c)
// evaluated with the measured per-edge rates (mu_min s / d^c)^(d^c) form.
// Requires d^c(x,y) > mu_min * s, the range where dropping all but the
// shortest path length is monotone. h and beta only set the walk time.
double improved_lower_bound(const IsoradialGraph& g, const WeightSet& w,
                            int x, int y, double t, double h, double beta);

// vol_h(u, n) = sum of m_v over the combinatorial n-ball.
double volume(const IsoradialGraph& g, const WeightSet& w, int u, int n);

struct GrowthFit {
  double exponent = 0.0;     // least-squares slope of log vol against log n
  double intercept = 0.0;
  double max_residual = 0.0;
};

GrowthFit volume_growth_fit(const IsoradialGraph& g, const WeightSet& w,
                            int u, int n_min, int n_max);

// Smallest C with  sum_{v in B_n} m_v (f - fbar)^2 <= C n^2 E(f)  for all f
// on B_2n, fbar the m-weighted mean over B_n and E(f) the ordered-pair
// Dirichlet sum over edges of B_2n (each undirected edge counted twice).
// Computed as the top generalized eigenvalue of the quadratic-form pair by
// Lanczos iteration in the Dirichlet inner product; B_2n must be interior.
double poincare_constant(const IsoradialGraph& g, const WeightSet& w,
                         int u0, int n);

struct VertexPair {
  int u = 0;
  int v = 0;
};

struct GaussianFit {
  double c_lower = 0.0;      // p(u,v) >= c_lower * m_v / vol(u, floor(sqrt t)) * exp(-C_lower d^c(u,v)^2 / t)
  double C_lower = 0.0;
  double worst_slack = 0.0;  // min over samples of log p - log bound at the fitted constants
  int samples_used = 0;
  bool holds = false;
};

// Fits constant-speed Gaussian lower-bound constants on the given pairs and
// times: smallest C_lower on the grid {0.25, 0.5, ..., 10} admitting a
// feasible c_lower, then the largest feasible c_lower on the 1-2-5 log grid
// in [1e-6, 1]. Samples with t < d^c(u,v) are skipped (the bound form only
// applies at or above the combinatorial distance); an empty sample set after
// that restriction, or an infeasible grid, is reported via holds = false.
// q must be a constant-speed generator whose active set covers the pairs.
GaussianFit gaussian_lower_fit(const SparseGenerator& q, const IsoradialGraph& g,
                               const WeightSet& w,
                               const std::vector<VertexPair>& pairs,
                               const std::vector<double>& times);

} // namespace isoradial
