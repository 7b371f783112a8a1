#include "isoradial/walk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isoradial/errors.hpp"
#include "util.hpp"

namespace isoradial {

int WalkTrajectory::state_at(double t) const {
  // first jump time strictly after t; the walk holds vertex[k] on
  // [jump_time[k-1], jump_time[k])
  auto it = std::upper_bound(jump_time.begin(), jump_time.end(), t);
  return vertex[static_cast<std::size_t>(it - jump_time.begin())];
}

WalkTrajectory sample_trajectory(const IsoradialGraph& g, const WeightSet& w,
                                 int u0, double horizon, std::uint64_t seed) {
  if (u0 < 0 || u0 >= g.n())
    throw Error(ErrorCode::invalid_argument, "start vertex out of range");
  if (!g.is_interior(u0))
    throw Error(ErrorCode::boundary, "walk must start at an interior vertex");
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw Error(ErrorCode::invalid_argument, "horizon must be finite and nonnegative");

  util::Rng rng(seed, 0);
  WalkTrajectory traj;
  traj.horizon = horizon;
  traj.seed = seed;
  traj.vertex.push_back(u0);

  int u = u0;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(w.lambda[u]);
    if (t >= horizon) break;
    // next vertex with probability omega / m by cumulative scan
    double target = rng.uniform() * w.vertex_mass[u];
    auto nbrs = g.neighbors(u);
    auto edges = g.incident_edges(u);
    int next = nbrs.back();
    double cum = 0.0;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      cum += w.omega[edges[k]];
      if (target < cum) {
        next = nbrs[k];
        break;
      }
    }
    if (!g.is_interior(next)) {
      std::ostringstream msg;
      msg << "walk left the interior after " << traj.jumps() + 1
          << " jumps (t = " << t << "); enlarge the window so every vertex "
          << "reachable before the horizon stays interior";
      throw Error(ErrorCode::boundary, msg.str());
    }
    traj.vertex.push_back(next);
    traj.jump_time.push_back(t);
    u = next;
  }
  return traj;
}

namespace {

// slope of new time against old time while the walk sits at u
double clock_rate(const WeightSet& w, int u, bool to_constant) {
  double r = w.vertex_mass[u] / (2.0 * w.dual_area[u]);  // lambda(u)
  return to_constant ? r : 1.0 / r;
}

WalkTrajectory reclock(const WalkTrajectory& traj, const WeightSet& w,
                       bool to_constant) {
  WalkTrajectory out;
  out.vertex = traj.vertex;
  out.seed = traj.seed;
  out.jump_time.reserve(traj.jump_time.size());
  double t_old = 0.0, t_new = 0.0;
  for (std::size_t k = 0; k < traj.jump_time.size(); ++k) {
    double rate = clock_rate(w, traj.vertex[k], to_constant);
    t_new += (traj.jump_time[k] - t_old) * rate;
    t_old = traj.jump_time[k];
    out.jump_time.push_back(t_new);
  }
  int last = traj.vertex.back();
  out.horizon = t_new + (traj.horizon - t_old) * clock_rate(w, last, to_constant);
  return out;
}

} // namespace

WalkTrajectory time_change(const WalkTrajectory& traj, const WeightSet& w) {
  return reclock(traj, w, true);
}

WalkTrajectory time_change_inverse(const WalkTrajectory& traj, const WeightSet& w) {
  return reclock(traj, w, false);
}

EmpiricalMoments empirical_moments(const IsoradialGraph& g, const WeightSet& w,
                                   int u0, double horizon, std::int64_t samples,
                                   std::uint64_t seed, int threads) {
  if (samples < 1)
    throw Error(ErrorCode::invalid_argument, "sample count must be positive");
  if (u0 < 0 || u0 >= g.n() || !g.is_interior(u0))
    throw Error(ErrorCode::boundary, "start vertex must be interior");

  // one RNG stream per trajectory index; per-block partial sums merged in
  // block order keep the reduction identical for every thread count
  constexpr std::int64_t kBlock = 4096;
  std::int64_t n_blocks = (samples + kBlock - 1) / kBlock;
  struct Partial {
    util::KahanSum sx, sy, sxx, syy, sxy, sx4, sy4, sxy2;
  };
  std::vector<Partial> partial(n_blocks);

  Point start = g.position[u0];
  util::parallel_blocks(samples, kBlock, threads,
                        [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
    Partial& p = partial[b];
    for (std::int64_t i = lo; i < hi; ++i) {
      util::Rng rng(seed, static_cast<std::uint64_t>(i) + 1);
      int u = u0;
      double t = 0.0;
      for (;;) {
        t += rng.exponential(w.lambda[u]);
        if (t >= horizon) break;
        double target = rng.uniform() * w.vertex_mass[u];
        auto nbrs = g.neighbors(u);
        auto edges = g.incident_edges(u);
        int next = nbrs.back();
        double cum = 0.0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
          cum += w.omega[edges[k]];
          if (target < cum) {
            next = nbrs[k];
            break;
          }
        }
        if (!g.is_interior(next)) {
          std::ostringstream msg;
          msg << "trajectory " << i << " left the interior before the horizon; "
              << "enlarge the window";
          throw Error(ErrorCode::boundary, msg.str());
        }
        u = next;
      }
      double dx = g.position[u].x - start.x;
      double dy = g.position[u].y - start.y;
      p.sx.add(dx);
      p.sy.add(dy);
      p.sxx.add(dx * dx);
      p.syy.add(dy * dy);
      p.sxy.add(dx * dy);
      p.sx4.add(dx * dx * dx * dx);
      p.sy4.add(dy * dy * dy * dy);
      p.sxy2.add(dx * dy * dx * dy);
    }
  });

  util::KahanSum sx, sy, sxx, syy, sxy, sx4, sy4, sxy2;
  for (const auto& p : partial) {
    sx.add(p.sx.value());
    sy.add(p.sy.value());
    sxx.add(p.sxx.value());
    syy.add(p.syy.value());
    sxy.add(p.sxy.value());
    sx4.add(p.sx4.value());
    sy4.add(p.sy4.value());
    sxy2.add(p.sxy2.value());
  }

  double n = static_cast<double>(samples);
  EmpiricalMoments m;
  m.samples = samples;
  m.mean = {sx.value() / n, sy.value() / n};
  double m2x = sxx.value() / n, m2y = syy.value() / n;
  double m4x = sx4.value() / n, m4y = sy4.value() / n;
  double mxy = sxy.value() / n, mxy2 = sxy2.value() / n;
  m.var_re = (sxx.value() - n * m.mean.x * m.mean.x) / (n - 1.0);
  m.var_im = (syy.value() - n * m.mean.y * m.mean.y) / (n - 1.0);
  m.cov = (sxy.value() - n * m.mean.x * m.mean.y) / (n - 1.0);
  m.mean_se = {std::sqrt(m.var_re / n), std::sqrt(m.var_im / n)};
  // SE of a sample second moment: sqrt((m4 - m2^2)/n)
  m.var_re_se = std::sqrt(std::max(0.0, m4x - m2x * m2x) / n);
  m.var_im_se = std::sqrt(std::max(0.0, m4y - m2y * m2y) / n);
  m.cov_se = std::sqrt(std::max(0.0, mxy2 - mxy * mxy) / n);
  m.fourth_ratio_re = m4x / (3.0 * m2x * m2x);
  m.fourth_ratio_im = m4y / (3.0 * m2y * m2y);
  return m;
}

} // namespace isoradial
