#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "isoradial/geometry.hpp"
#include "isoradial/operators.hpp"

namespace isoradial {

// One row u of exp(tQ), supported on the vertices the truncated Poisson
// mixture can reach. Stored scaled: the entry for vertices[i] is
// scaled_value[i] * exp(log_scale), with max_i scaled_value[i] == 1 so the
// row survives far below the double underflow floor.
//
// Mass sandwich: sum of values <= 1 <= sum of values + leaked_mass_bound.
struct KernelRow {
  int source = -1;
  double t = 0.0;
  std::vector<int> vertices;       // BFS order from source
  std::vector<double> scaled_value;
  double log_scale = 0.0;
  double leaked_mass_bound = 0.0;  // Poisson tail beyond the truncation depth
  int steps_used = 0;              // truncation depth K

  double value(int i) const;       // scaled_value[i] * exp(log_scale)
  double mass() const;             // sum of values
  int find(int v) const;           // index of vertex v in `vertices`, -1 if absent
};

// Row of exp(tQ) by uniformization: P = I + Q / lambda_max, row =
// sum_k Pois(lambda_max t)(k) * delta_u P^k, K chosen so the Poisson tail is
// <= tol/2. One step moves mass at most one edge, so the row is confined to
// the combinatorial K-ball exactly; if that ball reaches an inactive row the
// window cannot certify the value and the call throws window_too_small with
// the required radius in the message.
KernelRow kernel_row(const SparseGenerator& q, int u, double t, double tol = 1e-10);

struct LogEntry {
  double log_value = 0.0;       // log p_t(u, v)
  double rel_error_bound = 0.0; // relative truncation error of exp(log_value)
  int steps_used = 0;
  bool below_floor = false;     // provably below the accumulation floor; log_value is -inf
};

// log p_t(u, v) accurate to rel_tol even when p is far below 1e-308.
// Accumulates log Pois(k) + log_scale_k + log pi_k(v) by log-sum-exp.
LogEntry kernel_log_entry(const SparseGenerator& q, int u, int v, double t,
                          double rel_tol = 1e-6);

struct KernelMoments {
  double mass = 0.0;
  Point mean{0.0, 0.0};         // sum_v p(u,v) (v - u)
  double second_re = 0.0;       // sum_v p(u,v) Re(v-u)^2
  double second_im = 0.0;
  double cross = 0.0;           // sum_v p(u,v) Re(v-u) Im(v-u)
  double fourth_re = 0.0;       // sum_v p(u,v) Re(v-u)^4
  double fourth_im = 0.0;
  double truncation_error = 0.0;
};

// Displacement moments of the kernel row. The truncation depth is pushed
// until the moment-weighted Poisson tails (not just the mass tail) are below
// tol, so each reported moment carries additive error <= truncation_error.
KernelMoments kernel_moments(const SparseGenerator& q, const IsoradialGraph& g,
                             int u, double t, double tol = 1e-10);

// P(X_t in region), region tested on vertex positions. Additive error <= tol;
// the realized bound is written to *err when non-null.
double kernel_event_probability(const SparseGenerator& q, const IsoradialGraph& g,
                                int u, double t,
                                const std::function<bool(Point)>& region,
                                double tol = 1e-12, double* err = nullptr);

} // namespace isoradial
