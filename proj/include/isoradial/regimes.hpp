#pragma once

#include <vector>

#include "isoradial/geometry.hpp"

namespace isoradial {

// Shared setup for the scaling sweeps. Windows are sized automatically from
// the kernel truncation certificate unless extent_override is set. Square
// and triangular sweeps use spacing = h so that h * d^c(x, y) is exact.
struct SweepConfig {
  Family family = Family::square;
  bool square_spacing = true;
  Point x{0.0, 0.0};
  Point y{1.0, 0.0};
  double t = 1.0;
  double beta = 0.5;
  std::vector<double> h_sequence;  // strictly decreasing
  double tol = 1e-6;               // relative tolerance for kernel log entries
  double gap_threshold = 0.1;      // final |gap| for a converging verdict
  int threads = 0;
  int extent_override = 0;
};

enum class Verdict { converging, inconclusive };

struct SweepRow {
  double h = 0.0;
  int dc = 0;            // d^c between the per-h projections of x and y
  double h_dc = 0.0;
  double log_value = 0.0;
  double scaled = 0.0;   // scaled log-kernel (or log-probability)
  double target = 0.0;
  double gap = 0.0;      // scaled - target
  double error_bound = 0.0;  // certified kernel error propagated onto `scaled`
  bool certified = false;    // kernel evaluation produced its certificate
  bool accepted = false;     // certified and error_bound <= 1% of |scaled|
  int window_extent = 0;
  int steps_used = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;   // in h_sequence order
  Verdict verdict = Verdict::inconclusive;
  double gap_threshold = 0.0;
};

// h^beta log p_{h^beta t}(x, y) against -|x-y|^2 / (2t). beta in (0, 1).
// A failed kernel certificate marks its row and the sweep continues; the
// verdict is converging iff all rows are accepted, |gap| is nonincreasing
// over the last three rows, and the final |gap| is below gap_threshold.
SweepResult euclidean_sweep(const SweepConfig& cfg);

// (h / log h^(beta-1)) log p_{h^beta t}(x, y) against h d^c(x, y). beta > 1.
SweepResult graph_sweep(const SweepConfig& cfg);

struct BallRegion {
  Point center{0.0, 0.0};
  double radius = 0.0;
};

// h^beta log P[X_{h^beta T} in U] against -inf_{u in U} |u-x|^2 / (2T),
// the infimum realized by the straight line from x to the nearest point of
// the closed ball. beta in (0, 1). cfg.t is ignored in favor of T.
SweepResult ldp_sweep(const SweepConfig& cfg, const BallRegion& U, double T);

// Legendre transform of the limiting log-moment generating function.
double rate_function(Point v);

// -inf_{u in U} |u-x|^2 / (2T) = -rate_function(shortfall vector) / T.
double ldp_target(Point x, const BallRegion& U, double T);

} // namespace isoradial
