#include "isoradial/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "isoradial/errors.hpp"
#include "isoradial/kernel.hpp"
#include "isoradial/operators.hpp"
#include "util.hpp"

namespace isoradial {
namespace {

// Rows are evaluated sequentially and in h order: the finest window can take
// on the order of a gigabyte transiently, so running rows side by side would
// multiply peak memory for no certainty gain. All randomness-free.

struct FamilyProbe {
  double step = 0.0;    // shortest primal edge at h = 1; scales linearly in h
  double lambda1 = 0.0; // largest interior jump intensity at h = 1; scales h^-2
  double mu_min1 = 0.0; // directed-rate range at h = 1; scales h^-2
  double mu_max1 = 0.0;
  int max_degree = 0;
};

GeneratorSpec window_spec(const SweepConfig& cfg, double h, int extent) {
  GeneratorSpec s;
  s.family = cfg.family;
  s.h = h;
  s.extent = extent;
  s.spacing_convention = cfg.square_spacing && cfg.family != Family::rhombic_tracks;
  return s;
}

FamilyProbe probe_family(const SweepConfig& cfg) {
  const IsoradialGraph g = generate(window_spec(cfg, 1.0, 4));
  const WeightSet w = compute_weights(g);
  FamilyProbe p;
  p.step = std::numeric_limits<double>::infinity();
  for (int e = 0; e < g.m(); ++e) p.step = std::min(p.step, g.primal_length(e));
  p.mu_min1 = std::numeric_limits<double>::infinity();
  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) continue;
    p.lambda1 = std::max(p.lambda1, w.lambda[u]);
    p.max_degree = std::max(p.max_degree, g.degree(u));
    for (int k = g.neighbor_off[u]; k < g.neighbor_off[u + 1]; ++k) {
      p.mu_min1 = std::min(p.mu_min1, w.mu[k]);
      p.mu_max1 = std::max(p.mu_max1, w.mu[k]);
    }
  }
  return p;
}

// Smallest step count whose Poisson tail bound drops below the threshold.
int steps_for_tail(double lambda, double log_threshold) {
  std::int64_t k = static_cast<std::int64_t>(std::ceil(lambda)) + 1;
  while (util::log_poisson_tail_bound(k, lambda) > log_threshold && k < (1 << 26))
    ++k;
  return static_cast<int>(k);
}

void validate_sweep(const SweepConfig& cfg, bool beta_below_one, bool needs_t) {
  if (cfg.h_sequence.empty())
    throw Error(ErrorCode::invalid_argument, "sweep: h_sequence must be nonempty");
  for (std::size_t i = 0; i < cfg.h_sequence.size(); ++i) {
    const double h = cfg.h_sequence[i];
    if (!(h > 0.0) || !std::isfinite(h))
      throw Error(ErrorCode::invalid_argument, "sweep: every h must be positive");
    if (i > 0 && !(h < cfg.h_sequence[i - 1]))
      throw Error(ErrorCode::invalid_argument,
                  "sweep: h_sequence must be strictly decreasing");
  }
  if (needs_t && !(cfg.t > 0.0))
    throw Error(ErrorCode::invalid_argument, "sweep: t must be positive");
  if (!(cfg.tol > 0.0) || cfg.tol >= 1.0)
    throw Error(ErrorCode::invalid_argument, "sweep: tol must lie in (0, 1)");
  if (!(cfg.gap_threshold > 0.0))
    throw Error(ErrorCode::invalid_argument, "sweep: gap_threshold must be positive");
  if (cfg.beta == 1.0)
    throw Error(ErrorCode::invalid_argument,
                "sweep: beta = 1 is the excluded critical case between the "
                "two scaling regimes");
  if (beta_below_one && !(cfg.beta > 0.0 && cfg.beta < 1.0))
    throw Error(ErrorCode::invalid_argument,
                "sweep: this scaling regime requires beta in (0, 1)");
  if (!beta_below_one && !(cfg.beta > 1.0))
    throw Error(ErrorCode::invalid_argument,
                "sweep: this scaling regime requires beta > 1");
}

Verdict verdict_from(const std::vector<SweepRow>& rows, double threshold) {
  if (rows.empty()) return Verdict::inconclusive;
  for (const SweepRow& r : rows)
    if (!r.accepted) return Verdict::inconclusive;
  const std::size_t tail = std::min<std::size_t>(rows.size(), 3);
  for (std::size_t i = rows.size() - tail; i + 1 < rows.size(); ++i)
    if (std::abs(rows[i + 1].gap) > std::abs(rows[i].gap) + 1e-12)
      return Verdict::inconclusive;
  if (!(std::abs(rows.back().gap) <= threshold)) return Verdict::inconclusive;
  return Verdict::converging;
}

// Window extent for a log-entry row: the truncation ball must not touch the
// inactive rim. Step-count estimates are heuristics; the window certificate
// plus geometric retries carry correctness.
int estimate_extent(const SweepConfig& cfg, const FamilyProbe& p, double h,
                    double tau) {
  const double step = p.step * h;
  const double lambda = p.lambda1 / (h * h);
  const double big_lambda = lambda * tau;
  const double mu_min = p.mu_min1 / (h * h);
  const double mu_max = p.mu_max1 / (h * h);
  const double log_tol = std::log(cfg.tol);

  const int dc_est =
      static_cast<int>(std::ceil(2.0 * norm(cfg.y - cfg.x) / step)) + 3;

  // Diffusive estimate of the target log-entry, always applicable.
  const double l_eff = std::max(big_lambda, 1.0);
  double est = -static_cast<double>(dc_est) * static_cast<double>(dc_est) /
                   (2.0 * l_eff) -
               0.5 * std::log(2.0 * std::numbers::pi * l_eff);
  int k = steps_for_tail(big_lambda, est + log_tol - 4.0);

  // Ballistic estimate when the single-length lower-bound form applies.
  if (static_cast<double>(dc_est) > 2.0 * mu_min * tau) {
    const double est_ball =
        static_cast<double>(dc_est) *
            (std::log(mu_min * tau) - std::log(static_cast<double>(dc_est))) -
        mu_max * static_cast<double>(p.max_degree) * tau;
    k = std::max(k, steps_for_tail(big_lambda, est_ball + log_tol - 4.0));
  }

  const double off_center = std::max(norm(cfg.x), 0.0);
  int extent = k + static_cast<int>(std::ceil(off_center / step)) + 8;
  extent = std::max(extent, dc_est + 4);
  extent = std::max(extent,
                    static_cast<int>(std::ceil(norm(cfg.y) / step)) + 4);
  return std::max(extent, 4);
}

// One log-entry row: build the window, project the endpoints, evaluate the
// certified kernel entry. Geometry and weights are released before the kernel
// run; only the generator is held. Retries grow the window on truncation-ball
// overflow; a row that still overflows is left uncertified.
SweepRow log_entry_row(const SweepConfig& cfg, const FamilyProbe& p, double h,
                       double tau) {
  SweepRow row;
  row.h = h;
  int extent = cfg.extent_override > 0 ? cfg.extent_override
                                       : estimate_extent(cfg, p, h, tau);
  for (int attempt = 0;; ++attempt) {
    row.window_extent = extent;
    try {
      SparseGenerator q;
      int u = 0, v = 0;
      {
        const IsoradialGraph g = generate(window_spec(cfg, h, extent));
        const WeightSet w = compute_weights(g);
        u = project(g, cfg.x);
        v = project(g, cfg.y);
        row.dc = u == v ? 0 : combinatorial_distance(g, u, v);
        row.h_dc = h * static_cast<double>(row.dc);
        q = assemble_generator(g, w, GeneratorVariant::variable_speed,
                               BoundaryPolicy::absorbing);
      }
      const LogEntry e = kernel_log_entry(q, u, v, tau, cfg.tol);
      row.log_value = e.log_value;
      row.steps_used = e.steps_used;
      row.certified = !e.below_floor;
      if (row.certified)
        row.error_bound = -std::log1p(-std::min(e.rel_error_bound, 0.999999));
      return row;  // error_bound is in log-entry units; caller rescales
    } catch (const Error& err) {
      if (err.code() != ErrorCode::window_too_small) throw;
      if (attempt >= 2 || cfg.extent_override > 0) {
        row.certified = false;
        row.log_value = std::numeric_limits<double>::quiet_NaN();
        return row;
      }
      extent = static_cast<int>(std::ceil(static_cast<double>(extent) * 1.6)) + 8;
    }
  }
}

void finish_row(SweepRow& row, double scale, double target) {
  row.scaled = scale * row.log_value;
  row.target = target;
  row.gap = row.scaled - target;
  row.error_bound *= std::abs(scale);
  row.accepted = row.certified && std::isfinite(row.scaled) &&
                 row.error_bound <= 0.01 * std::abs(row.scaled);
}

}  // namespace

SweepResult euclidean_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg, /*beta_below_one=*/true, /*needs_t=*/true);
  const FamilyProbe probe = probe_family(cfg);
  SweepResult out;
  out.gap_threshold = cfg.gap_threshold;
  const double target = -norm2(cfg.y - cfg.x) / (2.0 * cfg.t);
  for (double h : cfg.h_sequence) {
    const double scale = std::pow(h, cfg.beta);
    const double tau = scale * cfg.t;
    SweepRow row = log_entry_row(cfg, probe, h, tau);
    finish_row(row, scale, target);
    out.rows.push_back(row);
  }
  out.verdict = verdict_from(out.rows, cfg.gap_threshold);
  return out;
}

SweepResult graph_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg, /*beta_below_one=*/false, /*needs_t=*/true);
  const FamilyProbe probe = probe_family(cfg);
  SweepResult out;
  out.gap_threshold = cfg.gap_threshold;
  for (double h : cfg.h_sequence) {
    const double tau = std::pow(h, cfg.beta) * cfg.t;
    // h / log(h^(beta-1)); negative log for h < 1, so the scale flips the
    // sign of the (negative) log-entry and the scaled value comes out > 0.
    const double scale = h / ((cfg.beta - 1.0) * std::log(h));
    SweepRow row = log_entry_row(cfg, probe, h, tau);
    finish_row(row, scale, row.h_dc);
    out.rows.push_back(row);
  }
  out.verdict = verdict_from(out.rows, cfg.gap_threshold);
  return out;
}

double rate_function(Point v) { return 0.5 * norm2(v); }

double ldp_target(Point x, const BallRegion& U, double T) {
  if (!(T > 0.0))
    throw Error(ErrorCode::invalid_argument, "ldp_target: T must be positive");
  if (!(U.radius > 0.0))
    throw Error(ErrorCode::invalid_argument, "ldp_target: radius must be positive");
  const Point d = U.center - x;
  const double dist = norm(d);
  const double shortfall = std::max(dist - U.radius, 0.0);
  Point nearest_step{0.0, 0.0};
  if (shortfall > 0.0)
    nearest_step = Point{d.x * (shortfall / dist), d.y * (shortfall / dist)};
  return -rate_function(nearest_step) / T;
}

SweepResult ldp_sweep(const SweepConfig& cfg, const BallRegion& U, double T) {
  validate_sweep(cfg, /*beta_below_one=*/true, /*needs_t=*/false);
  if (!(T > 0.0))
    throw Error(ErrorCode::invalid_argument, "ldp_sweep: T must be positive");
  if (!(U.radius > 0.0))
    throw Error(ErrorCode::invalid_argument, "ldp_sweep: radius must be positive");

  const FamilyProbe probe = probe_family(cfg);
  const double target = ldp_target(cfg.x, U, T);
  constexpr double kEventTol = 1e-12;  // additive mass tolerance per row

  SweepResult out;
  out.gap_threshold = cfg.gap_threshold;
  for (double h : cfg.h_sequence) {
    const double scale = std::pow(h, cfg.beta);
    const double tau = scale * T;
    SweepRow row;
    row.h = h;

    const double step = probe.step * h;
    const double lambda_tau = probe.lambda1 / (h * h) * tau;
    int extent = cfg.extent_override;
    if (extent <= 0) {
      const int k = steps_for_tail(lambda_tau, std::log(kEventTol / 2.0));
      extent = k + static_cast<int>(std::ceil(norm(cfg.x) / step)) + 8;
      const double reach = norm(U.center) + U.radius;
      extent = std::max(extent, static_cast<int>(std::ceil(reach / step)) + 4);
      extent = std::max(extent, 4);
    }

    for (int attempt = 0;; ++attempt) {
      row.window_extent = extent;
      try {
        const IsoradialGraph g = generate(window_spec(cfg, h, extent));
        const WeightSet w = compute_weights(g);
        const int u = project(g, cfg.x);
        const int v = project(g, U.center);
        row.dc = u == v ? 0 : combinatorial_distance(g, u, v);
        row.h_dc = h * static_cast<double>(row.dc);
        const SparseGenerator q = assemble_generator(
            g, w, GeneratorVariant::variable_speed, BoundaryPolicy::absorbing);
        double err = 0.0;
        const double prob = kernel_event_probability(
            q, g, u, tau,
            [&U](Point pt) { return norm(pt - U.center) < U.radius; },
            kEventTol, &err);
        row.log_value = std::log(prob);
        row.certified = prob > err && err >= 0.0;
        if (row.certified)
          row.error_bound = err / (prob - err);  // caller rescales by h^beta
        break;
      } catch (const Error& errobj) {
        if (errobj.code() != ErrorCode::window_too_small) throw;
        if (attempt >= 2 || cfg.extent_override > 0) {
          row.certified = false;
          row.log_value = std::numeric_limits<double>::quiet_NaN();
          break;
        }
        extent = static_cast<int>(std::ceil(static_cast<double>(extent) * 1.6)) + 8;
      }
    }

    finish_row(row, scale, target);
    out.rows.push_back(row);
  }
  out.verdict = verdict_from(out.rows, cfg.gap_threshold);
  return out;
}

}  // namespace isoradial
